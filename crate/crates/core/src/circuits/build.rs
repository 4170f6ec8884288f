use super::{Circuit, Gate, Layout, LayoutKind, SingleGate, TestKind};
use crate::error::{Error, Result};

/// Nearest-neighbour CNOTs implementing `CNOT(control → target)` on a line
/// of `width` qubits with `4d − 3` gates at distance `d`.
///
/// With `p₀ = control, …, p_d = target`, the control value is carried to
/// `p_{d−1}` by the pairs `CX(p_{k+1} → p_k) CX(p_k → p_{k+1})`, one CNOT
/// onto the target follows, and the carrying pairs are undone in reverse.
pub fn route_long_range_cnot(control: usize, target: usize, width: usize) -> Result<Vec<Gate>> {
    if control >= width || target >= width {
        return Err(Error::param(format!("positions ({control}, {target}) outside line of {width}")));
    }
    if control == target {
        return Err(Error::param("control and target coincide"));
    }
    let d = control.abs_diff(target);
    let path: Vec<usize> = if control < target { (control..=target).collect() } else { (target..=control).rev().collect() };
    let mut carry = Vec::with_capacity(2 * (d - 1));
    for k in 0..d - 1 {
        carry.push(Gate::cnot(path[k + 1], path[k]));
        carry.push(Gate::cnot(path[k], path[k + 1]));
    }
    let mut gates = carry.clone();
    gates.push(Gate::cnot(path[d - 1], path[d]));
    gates.extend(carry.into_iter().rev());
    Ok(gates)
}

/// Transversal Bell-basis measurement: for each pair `(A_i, B_i)` a routed
/// CNOT from `A_i` to `B_i` and a Hadamard on `A_i`.
pub fn build_bell_circuit(n: usize, kind: LayoutKind) -> Result<Circuit> {
    if n == 0 {
        return Err(Error::param("registers need at least one qubit"));
    }
    let layout = Layout::new(kind, n, false);
    let mut c = Circuit::new(layout.width());
    for i in 0..n {
        let (a, b) = (layout.reg_a[i], layout.reg_b[i]);
        c.extend(route_long_range_cnot(a, b, c.width())?)?;
        c.push(Gate::single(SingleGate::H, a))?;
    }
    c.set_test(TestKind::Bell, layout)?;
    Ok(c)
}

/// Textbook Toffoli with six CNOTs.
pub fn toffoli(c1: usize, c2: usize, t: usize) -> Vec<Gate> {
    use SingleGate::*;
    let s = Gate::single;
    vec![
        s(H, t),
        Gate::cnot(c2, t),
        s(Tdg, t),
        Gate::cnot(c1, t),
        s(T, t),
        Gate::cnot(c2, t),
        s(Tdg, t),
        Gate::cnot(c1, t),
        s(T, c2),
        s(T, t),
        s(H, t),
        Gate::cnot(c1, c2),
        s(T, c1),
        s(Tdg, c2),
        Gate::cnot(c1, c2),
    ]
}

/// Controlled SWAP of `x` and `y`: `CX(y → x) · Toffoli(a, x → y) · CX(y → x)`.
pub fn fredkin(a: usize, x: usize, y: usize) -> Vec<Gate> {
    let mut g = vec![Gate::cnot(y, x)];
    g.extend(toffoli(a, x, y));
    g.push(Gate::cnot(y, x));
    g
}

/// SWAP test: Hadamard on the ancilla, a controlled SWAP per register pair,
/// Hadamard on the ancilla. All CNOTs are routed to nearest neighbours.
pub fn build_standard_swap_test(n: usize, kind: LayoutKind) -> Result<Circuit> {
    if n == 0 {
        return Err(Error::param("registers need at least one qubit"));
    }
    let layout = Layout::new(kind, n, true);
    let anc = layout.ancilla.expect("ancilla layout");
    let mut logical = Circuit::new(layout.width());
    logical.push(Gate::single(SingleGate::H, anc))?;
    for i in 0..n {
        logical.extend(fredkin(anc, layout.reg_a[i], layout.reg_b[i]))?;
    }
    logical.push(Gate::single(SingleGate::H, anc))?;
    logical.set_test(TestKind::Ancilla, layout)?;
    logical.routed()
}

/// `18n² − 6n`, the nearest-neighbour CNOT count of the improved SWAP test
/// (interpolating 12, 60, 144 and 1104 at n = 1, 2, 3, 8).
pub fn improved_swap_cnot_count(n: usize) -> Result<usize> {
    if n == 0 {
        return Err(Error::param("registers need at least one qubit"));
    }
    Ok(18 * n * n - 6 * n)
}
