//! Gate-level circuits over the two qubits, each gate tagged with the
//! basis frame it is expressed in. Compilation happens in the standard
//! frame only: a gate in frame f compiles to the frame change conjugate
//! of its textbook matrix. Circuits fix |b> on the left, so every
//! circuit induces an isometry on the a input.

use serde::{Deserialize, Serialize};

use crate::bloch::GammaDelta;
use crate::canonical::CanonicalDecomposition;
use crate::error::{Error, Result};
use crate::linalg::{
    equal_up_to_phase_isometry, partial_trace, tensor_op, tensor_vec, COp, CVec, Isometry, Keep,
    C64,
};

/// Which qubit line a gate acts on or is controlled by.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Wire {
    A,
    B,
}

impl Wire {
    pub fn other(self) -> Wire {
        match self {
            Wire::A => Wire::B,
            Wire::B => Wire::A,
        }
    }
}

/// Basis frame for gate interpretation. The x and y frames carry the
/// exact phases |0_x> = (|0>+|1>)/sqrt2, |1_x> = (|0>-|1>)/sqrt2,
/// |0_y> = (|0>+i|1>)/sqrt2, |1_y> = (|0>-i|1>)/sqrt2; other phase
/// choices produce genuinely different circuits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    #[default]
    Standard,
    X,
    Y,
}

impl Basis {
    /// Frame change as a unitary whose columns are the frame vectors.
    pub fn frame_unitary(self) -> COp {
        let s = 1.0 / 2f64.sqrt();
        match self {
            Basis::Standard => COp::identity(2),
            Basis::X => COp::from_rows(&[
                &[C64::new(s, 0.0), C64::new(s, 0.0)],
                &[C64::new(s, 0.0), C64::new(-s, 0.0)],
            ]),
            Basis::Y => COp::from_rows(&[
                &[C64::new(s, 0.0), C64::new(s, 0.0)],
                &[C64::new(0.0, s), C64::new(0.0, -s)],
            ]),
        }
    }

    /// The frame's j-th basis vector.
    pub fn vector(self, j: usize) -> CVec {
        self.frame_unitary().apply(&CVec::basis(2, j))
    }
}

/// y-axis rotation, R(phi)|0> = cos(phi/2)|0> + sin(phi/2)|1>.
pub fn rotation(phi: f64) -> COp {
    let (s, c) = (0.5 * phi).sin_cos();
    COp::from_rows(&[
        &[C64::new(c, 0.0), C64::new(-s, 0.0)],
        &[C64::new(s, 0.0), C64::new(c, 0.0)],
    ])
}

/// Hadamard gate.
pub fn hadamard() -> COp {
    let s = 1.0 / 2f64.sqrt();
    COp::from_rows(&[
        &[C64::new(s, 0.0), C64::new(s, 0.0)],
        &[C64::new(s, 0.0), C64::new(-s, 0.0)],
    ])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Gate {
    /// Controlled-NOT; flips the other wire when the control is the
    /// frame's |1>.
    Cnot {
        control: Wire,
        #[serde(default)]
        frame: Basis,
    },
    /// One-qubit rotation by phi about the frame's y axis.
    Rot {
        target: Wire,
        phi: f64,
        #[serde(default)]
        frame: Basis,
    },
    Hadamard {
        target: Wire,
        #[serde(default)]
        frame: Basis,
    },
    /// Controlled rotation: the target picks up R(+phi) when the
    /// control reads the frame's |0> and R(-phi) when it reads |1>.
    Crot {
        control: Wire,
        phi: f64,
        #[serde(default)]
        frame: Basis,
    },
    /// Arbitrary one-qubit unitary supplied as a matrix in the frame.
    Unitary {
        target: Wire,
        matrix: COp,
        #[serde(default)]
        frame: Basis,
    },
    /// Interchanges the two output lines.
    Swap,
}

fn embed_one_qubit(g: &COp, target: Wire) -> COp {
    match target {
        Wire::A => tensor_op(g, &COp::identity(2)).expect("2x2 -> 4"),
        Wire::B => tensor_op(&COp::identity(2), g).expect("2x2 -> 4"),
    }
}

fn cnot_standard(control: Wire) -> COp {
    let mut u = COp::zeros(4);
    for a in 0..2 {
        for b in 0..2 {
            let (a2, b2) = match control {
                Wire::A => (a, b ^ a),
                Wire::B => (a ^ b, b),
            };
            u.set(2 * a2 + b2, 2 * a + b, C64::new(1.0, 0.0));
        }
    }
    u
}

fn crot_standard(control: Wire, phi: f64) -> COp {
    let mut u = COp::zeros(4);
    for k in 0..2 {
        let sign = if k == 0 { 1.0 } else { -1.0 };
        let r = rotation(sign * phi);
        for i in 0..2 {
            for j in 0..2 {
                let (row, col) = match control {
                    Wire::B => (2 * i + k, 2 * j + k),
                    Wire::A => (2 * k + i, 2 * k + j),
                };
                u.set(row, col, r.get(i, j));
            }
        }
    }
    u
}

/// Standard-frame matrix of a gate: the textbook matrix conjugated by
/// the frame change on both qubits.
pub fn gate_unitary(g: &Gate) -> COp {
    let (core, frame) = match g {
        Gate::Cnot { control, frame } => (cnot_standard(*control), *frame),
        Gate::Rot { target, phi, frame } => (embed_one_qubit(&rotation(*phi), *target), *frame),
        Gate::Hadamard { target, frame } => (embed_one_qubit(&hadamard(), *target), *frame),
        Gate::Crot { control, phi, frame } => (crot_standard(*control, *phi), *frame),
        Gate::Unitary { target, matrix, frame } => (embed_one_qubit(matrix, *target), *frame),
        Gate::Swap => {
            let mut u = COp::zeros(4);
            for a in 0..2 {
                for b in 0..2 {
                    u.set(2 * b + a, 2 * a + b, C64::new(1.0, 0.0));
                }
            }
            // swap commutes with any shared frame change
            return u;
        }
    };
    if frame == Basis::Standard {
        return core;
    }
    let f = frame.frame_unitary();
    let ff = tensor_op(&f, &f).expect("2x2 -> 4");
    &(&ff * &core) * &ff.adjoint()
}

/// Ordered gate list with the fixed b-qubit state entering on the left.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    pub b_init: CVec,
    pub gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(b_init: CVec, gates: Vec<Gate>) -> Result<Self> {
        if b_init.dim() != 2 {
            return Err(Error::DimMismatch("b_init must be a qubit state".into()));
        }
        if !b_init.is_unit(1e-12) {
            return Err(Error::NotNormalized(b_init.norm()));
        }
        Ok(Self { b_init, gates })
    }

    /// Product of the gate unitaries in temporal order (leftmost gate
    /// acts first).
    pub fn compile(&self) -> COp {
        let mut u = COp::identity(4);
        for g in &self.gates {
            u = &gate_unitary(g) * &u;
        }
        u
    }

    /// The induced isometry on the a input.
    pub fn isometry(&self) -> Isometry {
        let u = self.compile();
        let col = |j: usize| u.apply(&tensor_vec(&CVec::basis(2, j), &self.b_init).unwrap());
        Isometry::new(col(0), col(1)).expect("unitary circuit on a fixed b state")
    }
}

/// Compiled-isometry equality up to a global phase at 1e-10.
pub fn equivalent(c1: &Circuit, c2: &Circuit) -> bool {
    equal_up_to_phase_isometry(&c1.isometry(), &c2.isometry(), 1e-10)
}

/// The canonical-form circuit: [R_b(gamma), CNOT(a), R_b(-delta),
/// CNOT(b)] on b = |0>.
pub fn build_fig2a(gd: &GammaDelta) -> Circuit {
    Circuit::new(
        CVec::basis(2, 0),
        vec![
            Gate::Rot { target: Wire::B, phi: gd.gamma, frame: Basis::Standard },
            Gate::Cnot { control: Wire::A, frame: Basis::Standard },
            Gate::Rot { target: Wire::B, phi: -gd.delta, frame: Basis::Standard },
            Gate::Cnot { control: Wire::B, frame: Basis::Standard },
        ],
    )
    .expect("basis state")
}

/// Full-isometry circuit: S_o on a before the canonical block, S_a and
/// S_b after it.
pub fn build_fig2b(d: &CanonicalDecomposition) -> Circuit {
    let gd = GammaDelta::from_zeta_eta(d.zeta, d.eta);
    let mut gates = vec![Gate::Unitary {
        target: Wire::A,
        matrix: d.s_o.clone(),
        frame: Basis::Standard,
    }];
    gates.extend(build_fig2a(&gd).gates);
    gates.push(Gate::Unitary {
        target: Wire::A,
        matrix: d.s_a.clone(),
        frame: Basis::Standard,
    });
    gates.push(Gate::Unitary {
        target: Wire::B,
        matrix: d.s_b.clone(),
        frame: Basis::Standard,
    });
    Circuit::new(CVec::basis(2, 0), gates).expect("basis state")
}

/// Alternative canonical circuit with Hadamards on the a input and the
/// b output: [H(a), CNOT(a), R_a(gamma), R_b(delta), CNOT(b), H(b)].
/// Same isometry as the circuit of [`build_fig2a`], different unitary.
pub fn build_fig2c(gd: &GammaDelta) -> Circuit {
    Circuit::new(
        CVec::basis(2, 0),
        vec![
            Gate::Hadamard { target: Wire::A, frame: Basis::Standard },
            Gate::Cnot { control: Wire::A, frame: Basis::Standard },
            Gate::Rot { target: Wire::A, phi: gd.gamma, frame: Basis::Standard },
            Gate::Rot { target: Wire::B, phi: gd.delta, frame: Basis::Standard },
            Gate::Cnot { control: Wire::B, frame: Basis::Standard },
            Gate::Hadamard { target: Wire::B, frame: Basis::Standard },
        ],
    )
    .expect("basis state")
}

/// Frame for the mode-basis circuits; only x and y are meaningful.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeFrame {
    X,
    Y,
}

impl ModeFrame {
    pub fn basis(self) -> Basis {
        match self {
            ModeFrame::X => Basis::X,
            ModeFrame::Y => Basis::Y,
        }
    }
}

/// Mode-basis canonical circuit: in the x frame
/// [R_b(delta), CNOT(a), CRot(b, gamma')] on b = |0_x>, and in the y
/// frame [R_b(gamma), CNOT(a), CRot(b, delta')] on b = |0_y>, with the
/// primed angles gamma' = pi/2 - gamma, delta' = pi/2 - delta. Both
/// reproduce the isometry of [`build_fig2a`] at the unprimed angles.
pub fn build_fig3(gd_primed: &GammaDelta, frame: ModeFrame) -> Circuit {
    use std::f64::consts::FRAC_PI_2;
    let basis = frame.basis();
    let (b_gate, crot_angle) = match frame {
        // the b gate carries the unprimed partner angle
        ModeFrame::X => (FRAC_PI_2 - gd_primed.delta, gd_primed.gamma),
        ModeFrame::Y => (FRAC_PI_2 - gd_primed.gamma, gd_primed.delta),
    };
    Circuit::new(
        basis.vector(0),
        vec![
            Gate::Rot { target: Wire::B, phi: b_gate, frame: basis },
            Gate::Cnot { control: Wire::A, frame: basis },
            Gate::Crot { control: Wire::B, phi: crot_angle, frame: basis },
        ],
    )
    .expect("frame vector is normalized")
}

/// Mode-basis circuit with the destinations of the final bits
/// interchanged: the [`build_fig3`] family at the swapped primed angles
/// followed by an output swap. Same isometry again.
pub fn build_fig6(gd_primed: &GammaDelta, frame: ModeFrame) -> Circuit {
    use std::f64::consts::FRAC_PI_2;
    let swapped = GammaDelta::new(FRAC_PI_2 - gd_primed.delta, FRAC_PI_2 - gd_primed.gamma);
    let mut circuit = build_fig3(&swapped, frame);
    circuit.gates.push(Gate::Swap);
    circuit
}

/// Circuit prefix, a one-qubit measurement on b, and classically
/// controlled one-qubit operations on a.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasuredCircuit {
    pub pre_gates: Circuit,
    /// Measurement basis on qubit b.
    pub measurement: Basis,
    /// Outcome-indexed unitaries applied to qubit a.
    pub conditional_ops: [COp; 2],
}

impl MeasuredCircuit {
    /// Measurement branches for a pure a input: (probability, forwarded
    /// a state) per outcome, conditional operation already applied.
    pub fn branches_pure(&self, alpha: &CVec) -> [(f64, CVec); 2] {
        let psi = self
            .pre_gates
            .compile()
            .apply(&tensor_vec(alpha, &self.pre_gates.b_init).unwrap());
        let branch = |k: usize| {
            let bk = self.measurement.vector(k);
            // (I ⊗ <k|) psi
            let mut a_vec = CVec::zeros(2);
            for i in 0..2 {
                let amp = bk.get(0).conj() * psi.get(2 * i) + bk.get(1).conj() * psi.get(2 * i + 1);
                a_vec.set(i, amp);
            }
            let p = a_vec.norm().powi(2);
            let forwarded = if p > 0.0 {
                self.conditional_ops[k].apply(&a_vec.scale(C64::new(1.0 / p.sqrt(), 0.0)))
            } else {
                CVec::basis(2, 0)
            };
            (p, forwarded)
        };
        [branch(0), branch(1)]
    }

    /// Bob-side reduced density averaged over the measurement outcomes,
    /// for an arbitrary density input.
    pub fn averaged_output(&self, rho_in: &COp) -> COp {
        let u = self.pre_gates.compile();
        let binit = &self.pre_gates.b_init;
        let joint = {
            let rho_b = COp::outer(binit, binit);
            let big = tensor_op(rho_in, &rho_b).expect("2x2 factors");
            &(&u * &big) * &u.adjoint()
        };
        let mut acc = COp::zeros(2);
        for k in 0..2 {
            let bk = self.measurement.vector(k);
            let proj = tensor_op(&COp::identity(2), &COp::outer(&bk, &bk)).unwrap();
            let branch = &(&proj * &joint) * &proj;
            let reduced = partial_trace(&branch, Keep::A).unwrap();
            let c = &self.conditional_ops[k];
            acc = &acc + &(&(c * &reduced) * &c.adjoint());
        }
        acc
    }

    /// Joint probabilities p[eve outcome][bob outcome] with Bob
    /// measuring the forwarded qubit in the given basis.
    pub fn joint_statistics(&self, alpha: &CVec, bob_basis: Basis) -> [[f64; 2]; 2] {
        let branches = self.branches_pure(alpha);
        let mut p = [[0.0; 2]; 2];
        for (k, (pk, forwarded)) in branches.iter().enumerate() {
            for j in 0..2 {
                let bj = bob_basis.vector(j);
                p[k][j] = pk * bj.dot(forwarded).norm_sqr();
            }
        }
        p
    }
}

/// Measured-feedback variant of the x-frame circuit: everything up to
/// and including the CNOT, then an x measurement on b steering
/// R(+gamma') or R(-gamma') on a.
pub fn build_fig7(gd_primed: &GammaDelta) -> MeasuredCircuit {
    use std::f64::consts::FRAC_PI_2;
    let basis = Basis::X;
    let pre_gates = Circuit::new(
        basis.vector(0),
        vec![
            Gate::Rot { target: Wire::B, phi: FRAC_PI_2 - gd_primed.delta, frame: basis },
            Gate::Cnot { control: Wire::A, frame: basis },
        ],
    )
    .expect("frame vector");
    let rot_in_x = |phi: f64| {
        let f = basis.frame_unitary();
        &(&f * &rotation(phi)) * &f.adjoint()
    };
    MeasuredCircuit {
        pre_gates,
        measurement: basis,
        conditional_ops: [rot_in_x(gd_primed.gamma), rot_in_x(-gd_primed.gamma)],
    }
}
