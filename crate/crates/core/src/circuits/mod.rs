//! Overlap-test circuits on a one-dimensional line of qubits.
//!
//! Circuits are lists of layers of non-overlapping gates. Two-qubit gates
//! are CNOTs; long-range CNOTs are expanded into nearest-neighbour chains by
//! [`route_long_range_cnot`]. Two test kinds are recognized: the SWAP test,
//! read out on an ancilla, and the transversal Bell-basis measurement.

mod build;
mod format;
mod simulate;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::C64;

pub use build::{build_bell_circuit, build_standard_swap_test, improved_swap_cnot_count, route_long_range_cnot, fredkin, toffoli};
pub use format::{load_circuit, parse_circuit, save_circuit, write_circuit};
pub use simulate::{circuit_expectation_dense, estimate_overlap_via_circuit, estimate_overlap_via_circuit_dense, CircuitEstimate, NoiseModel};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum SingleGate {
    H,
    X,
    Y,
    Z,
    S,
    Sdg,
    T,
    Tdg,
    Rx(f64),
    Ry(f64),
    Rz(f64),
}

impl SingleGate {
    pub fn name(&self) -> &'static str {
        match self {
            SingleGate::H => "H",
            SingleGate::X => "X",
            SingleGate::Y => "Y",
            SingleGate::Z => "Z",
            SingleGate::S => "S",
            SingleGate::Sdg => "SDG",
            SingleGate::T => "T",
            SingleGate::Tdg => "TDG",
            SingleGate::Rx(_) => "RX",
            SingleGate::Ry(_) => "RY",
            SingleGate::Rz(_) => "RZ",
        }
    }

    pub fn angle(&self) -> Option<f64> {
        match *self {
            SingleGate::Rx(a) | SingleGate::Ry(a) | SingleGate::Rz(a) => Some(a),
            _ => None,
        }
    }

    pub fn matrix(&self) -> CMatrix {
        let c = |re: f64, im: f64| C64::new(re, im);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let q = std::f64::consts::FRAC_PI_4;
        let m = |a: [C64; 4]| CMatrix::from_row_slice(2, 2, &a);
        match *self {
            SingleGate::H => m([c(h, 0.0), c(h, 0.0), c(h, 0.0), c(-h, 0.0)]),
            SingleGate::X => crate::linalg::pauli_x(),
            SingleGate::Y => crate::linalg::pauli_y(),
            SingleGate::Z => crate::linalg::pauli_z(),
            SingleGate::S => m([c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 1.0)]),
            SingleGate::Sdg => m([c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, -1.0)]),
            SingleGate::T => m([c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), C64::from_polar(1.0, q)]),
            SingleGate::Tdg => m([c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), C64::from_polar(1.0, -q)]),
            SingleGate::Rx(a) => {
                let (s, co) = (a / 2.0).sin_cos();
                m([c(co, 0.0), c(0.0, -s), c(0.0, -s), c(co, 0.0)])
            }
            SingleGate::Ry(a) => {
                let (s, co) = (a / 2.0).sin_cos();
                m([c(co, 0.0), c(-s, 0.0), c(s, 0.0), c(co, 0.0)])
            }
            SingleGate::Rz(a) => m([C64::from_polar(1.0, -a / 2.0), c(0.0, 0.0), c(0.0, 0.0), C64::from_polar(1.0, a / 2.0)]),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Gate {
    Single { gate: SingleGate, qubit: usize },
    Cnot { control: usize, target: usize },
}

impl Gate {
    pub fn single(gate: SingleGate, qubit: usize) -> Self {
        Gate::Single { gate, qubit }
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Gate::Cnot { control, target }
    }

    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::Single { qubit, .. } => vec![qubit],
            Gate::Cnot { control, target } => vec![control, target],
        }
    }

    fn validate(&self, width: usize) -> Result<()> {
        let qs = self.qubits();
        if let Some(&q) = qs.iter().find(|&&q| q >= width) {
            return Err(Error::param(format!("qubit {q} outside circuit width {width}")));
        }
        if let Gate::Cnot { control, target } = *self {
            if control == target {
                return Err(Error::param(format!("CNOT control and target are both {control}")));
            }
        }
        Ok(())
    }
}

/// How the registers holding ρ and σ sit on the line.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LayoutKind {
    /// Ancilla (if any) first, then register A, then register B.
    #[default]
    Stacked,
    /// Ancilla (if any) first, then A₀ B₀ A₁ B₁ ….
    Interleaved,
}

/// Line positions of register A (ρ), register B (σ) and the ancilla.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Layout {
    pub reg_a: Vec<usize>,
    pub reg_b: Vec<usize>,
    pub ancilla: Option<usize>,
}

impl Layout {
    pub fn new(kind: LayoutKind, n: usize, ancilla: bool) -> Self {
        let off = usize::from(ancilla);
        let (reg_a, reg_b) = match kind {
            LayoutKind::Stacked => ((off..off + n).collect(), (off + n..off + 2 * n).collect()),
            LayoutKind::Interleaved => ((0..n).map(|i| off + 2 * i).collect(), (0..n).map(|i| off + 2 * i + 1).collect()),
        };
        Layout { reg_a, reg_b, ancilla: ancilla.then_some(0) }
    }

    pub fn n(&self) -> usize {
        self.reg_a.len()
    }

    pub fn width(&self) -> usize {
        self.reg_a.len() + self.reg_b.len() + usize::from(self.ancilla.is_some())
    }

    /// Logical qubit order: ancilla, A₀…, B₀….
    pub fn positions(&self) -> Vec<usize> {
        self.ancilla.iter().chain(&self.reg_a).chain(&self.reg_b).copied().collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.reg_a.len() != self.reg_b.len() || self.reg_a.is_empty() {
            return Err(Error::param("registers must be non-empty and of equal size"));
        }
        let width = self.width();
        let mut seen = vec![false; width];
        for p in self.positions() {
            if p >= width || seen[p] {
                return Err(Error::param(format!("layout is not a bijection onto 0..{width}")));
            }
            seen[p] = true;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TestKind {
    /// Overlap `2 P(ancilla = 0) − 1`.
    Ancilla,
    /// Overlap `E[Π_i (−1)^{p_i q_i}]` over pairs `(A_i, B_i)`.
    Bell,
}

#[derive(Clone, Debug)]
pub struct Circuit {
    width: usize,
    layers: Vec<Vec<Gate>>,
    /// Next free layer per qubit, for greedy placement.
    frontier: Vec<usize>,
    test: Option<(TestKind, Layout)>,
}

impl Circuit {
    pub fn new(width: usize) -> Self {
        Circuit { width, layers: Vec::new(), frontier: vec![0; width], test: None }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn layers(&self) -> &[Vec<Gate>] {
        &self.layers
    }

    pub fn gates(&self) -> impl Iterator<Item = &Gate> {
        self.layers.iter().flatten()
    }

    pub fn test(&self) -> Option<&(TestKind, Layout)> {
        self.test.as_ref()
    }

    pub fn set_test(&mut self, kind: TestKind, layout: Layout) -> Result<()> {
        layout.validate()?;
        if layout.width() != self.width {
            return Err(Error::DimensionMismatch { expected: self.width, got: layout.width() });
        }
        if (kind == TestKind::Ancilla) != layout.ancilla.is_some() {
            return Err(Error::param("ancilla tests need exactly one ancilla; Bell tests none"));
        }
        self.test = Some((kind, layout));
        Ok(())
    }

    /// Places a gate in the earliest layer after every earlier gate on its
    /// qubits.
    pub fn push(&mut self, gate: Gate) -> Result<()> {
        gate.validate(self.width)?;
        let qs = gate.qubits();
        let layer = qs.iter().map(|&q| self.frontier[q]).max().unwrap_or(0);
        if layer == self.layers.len() {
            self.layers.push(Vec::new());
        }
        self.layers[layer].push(gate);
        for q in qs {
            self.frontier[q] = layer + 1;
        }
        Ok(())
    }

    pub fn extend(&mut self, gates: impl IntoIterator<Item = Gate>) -> Result<()> {
        gates.into_iter().try_for_each(|g| self.push(g))
    }

    /// Appends a layer as given; its gates must act on disjoint qubits.
    pub fn push_layer(&mut self, gates: Vec<Gate>) -> Result<()> {
        let layer = self.layers.len();
        let mut used = vec![false; self.width];
        for g in &gates {
            g.validate(self.width)?;
            for q in g.qubits() {
                if used[q] {
                    return Err(Error::OverlappingGates { layer, qubit: q });
                }
                used[q] = true;
            }
        }
        self.frontier.iter_mut().for_each(|f| *f = (*f).max(layer + 1));
        self.layers.push(gates);
        Ok(())
    }

    /// The same circuit with every non-adjacent CNOT replaced by its
    /// nearest-neighbour chain, re-layered greedily.
    pub fn routed(&self) -> Result<Circuit> {
        let mut out = Circuit::new(self.width);
        for g in self.gates() {
            match *g {
                Gate::Cnot { control, target } if control.abs_diff(target) > 1 => out.extend(route_long_range_cnot(control, target, self.width)?)?,
                other => out.push(other)?,
            }
        }
        out.test = self.test.clone();
        Ok(out)
    }

    pub fn is_nearest_neighbour(&self) -> bool {
        self.gates().all(|g| match *g {
            Gate::Cnot { control, target } => control.abs_diff(target) == 1,
            Gate::Single { .. } => true,
        })
    }

    pub fn cnot_count(&self) -> usize {
        self.gates().filter(|g| matches!(g, Gate::Cnot { .. })).count()
    }
}

impl PartialEq for Circuit {
    fn eq(&self, other: &Self) -> bool {
        self.width == other.width && self.layers == other.layers && self.test == other.test
    }
}

/// `(CNOT count, layer count)` after routing.
pub fn count_resources(circ: &Circuit) -> Result<(usize, usize)> {
    let r = circ.routed()?;
    Ok((r.cnot_count(), r.layers().len()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn greedy_layering() {
        let mut c = Circuit::new(3);
        c.push(Gate::single(SingleGate::H, 0)).unwrap();
        c.push(Gate::cnot(0, 1)).unwrap();
        c.push(Gate::single(SingleGate::X, 2)).unwrap();
        assert_eq!(c.layers().len(), 2);
        assert_eq!(c.layers()[0].len(), 2);
        assert!(c.push(Gate::cnot(1, 1)).is_err());
        assert!(c.push(Gate::single(SingleGate::H, 3)).is_err());
        assert_eq!(count_resources(&Circuit::new(2)).unwrap(), (0, 0));
    }

    #[test]
    fn explicit_layers_reject_overlap() {
        let mut c = Circuit::new(2);
        let err = c.push_layer(vec![Gate::single(SingleGate::H, 0), Gate::single(SingleGate::X, 0)]);
        assert!(matches!(err, Err(Error::OverlappingGates { layer: 0, qubit: 0 })));
    }

    #[test]
    fn gate_matrices_are_unitary() {
        for g in [SingleGate::H, SingleGate::S, SingleGate::Tdg, SingleGate::Rx(0.3), SingleGate::Ry(1.1), SingleGate::Rz(-2.0)] {
            assert!(crate::linalg::unitarity_defect(&g.matrix()) < 1e-12);
        }
        let t2 = SingleGate::T.matrix() * SingleGate::T.matrix();
        assert!(crate::linalg::max_abs_diff_c(&t2, &SingleGate::S.matrix()) < 1e-12);
    }

    #[test]
    fn layouts() {
        let s = Layout::new(LayoutKind::Stacked, 2, true);
        assert_eq!(s.positions(), vec![0, 1, 2, 3, 4]);
        let i = Layout::new(LayoutKind::Interleaved, 2, false);
        assert_eq!(i.positions(), vec![0, 2, 1, 3]);
        assert!(i.validate().is_ok());
        let bad = Layout { reg_a: vec![0], reg_b: vec![0], ancilla: None };
        assert!(bad.validate().is_err());
    }
}
