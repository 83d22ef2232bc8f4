//! Stochastic copying machines: probabilistic mixtures of isometries
//! selected by a classical random signal, the branch pairing that
//! centers the output ellipsoids, and the unitary replacement that
//! drives the switch with a quantum coin.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bloch::{channel_of_isometry, AffineChannel, GammaDelta};
use crate::canonical::canonical_isometry;
use crate::circuits::rotation;
use crate::error::{Error, Result};
use crate::linalg::{
    partial_trace, partial_trace_parts, tensor_op, tensor_vec, COp, CVec, Isometry, Keep, C64,
};

/// Probabilistic mixture of copying isometries.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StochasticCopier {
    branches: Vec<(f64, Isometry)>,
}

impl StochasticCopier {
    pub fn new(branches: Vec<(f64, Isometry)>) -> Result<Self> {
        let mut total = 0.0;
        for (p, _) in &branches {
            if *p < 0.0 || !p.is_finite() {
                return Err(Error::InvalidProbability(*p));
            }
            total += p;
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidProbability(total));
        }
        Ok(Self { branches })
    }

    pub fn branches(&self) -> &[(f64, Isometry)] {
        &self.branches
    }

    /// Samples a branch index from the stream.
    pub fn sample_branch<R: Rng>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        for (i, (p, _)) in self.branches.iter().enumerate() {
            acc += p;
            if u < acc {
                return i;
            }
        }
        self.branches.len() - 1
    }
}

/// Probability-weighted average of the branch channels; matches mixing
/// the output density matrices because the Bloch map is affine.
pub fn averaged_channel(sc: &StochasticCopier, output: Keep) -> AffineChannel {
    let mut m = [[0.0; 3]; 3];
    let mut d = [0.0; 3];
    for (p, v) in &sc.branches {
        let ch = channel_of_isometry(v, output);
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] += p * ch.m[i][j];
            }
            d[i] += p * ch.d[i];
        }
    }
    AffineChannel { m, d }
}

/// Two-branch copier whose ellipsoids recenter at p0 = 1/2: branch 0 is
/// the canonical isometry at (gamma0, delta0); branch 1 runs at
/// (gamma0, pi - delta0) with an extra R(pi) on the b output, which
/// flips both displacement vectors while leaving both M matrices alone.
pub fn centered_copier(gd0: &GammaDelta, p0: f64) -> Result<StochasticCopier> {
    if !(0.0..=1.0).contains(&p0) {
        return Err(Error::InvalidProbability(p0));
    }
    let v0 = canonical_isometry(gd0.zeta(), gd0.eta());
    let gd1 = GammaDelta::new(gd0.gamma, std::f64::consts::PI - gd0.delta);
    let flip_b = tensor_op(&COp::identity(2), &rotation(std::f64::consts::PI))?;
    let v1 = canonical_isometry(gd1.zeta(), gd1.eta()).left_mul(&flip_b)?;
    StochasticCopier::new(vec![(p0, v0), (1.0 - p0, v1)])
}

/// Unitary replacement of a two-branch stochastic copier: an ancillary
/// coin qubit in sqrt(p0)|0_c> + sqrt(p1)|1_c> selects which branch
/// unitary acts. The coin carries the most significant index of the
/// three-qubit space.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoinEmbedding {
    pub u8: COp,
    pub coin_state: CVec,
    pub b_init: CVec,
}

/// Builds the coin embedding from the two branch unitaries. The copier
/// must have exactly two branches and the unitaries must reproduce the
/// branch isometries on the given b state.
pub fn coin_embedding(p0: f64, u0: &COp, u1: &COp, b_init: &CVec) -> Result<CoinEmbedding> {
    if u0.dim() != 4 || u1.dim() != 4 || b_init.dim() != 2 {
        return Err(Error::DimMismatch(
            "coin embedding needs two 4x4 unitaries and a qubit state".into(),
        ));
    }
    if !(0.0..=1.0).contains(&p0) {
        return Err(Error::InvalidProbability(p0));
    }
    let proj = |k: usize| COp::outer(&CVec::basis(2, k), &CVec::basis(2, k));
    let u8 = &tensor_op(&proj(0), u0)? + &tensor_op(&proj(1), u1)?;
    let coin_state = CVec::from_reals(&[p0.sqrt(), (1.0 - p0).sqrt()]);
    Ok(CoinEmbedding {
        u8,
        coin_state,
        b_init: b_init.clone(),
    })
}

impl CoinEmbedding {
    /// Full three-qubit evolution on a density input, with the coin
    /// already traced out.
    pub fn evolve_and_trace_coin(&self, rho_in: &COp) -> COp {
        let rho_coin = COp::outer(&self.coin_state, &self.coin_state);
        let rho_b = COp::outer(&self.b_init, &self.b_init);
        let rho_ab = tensor_op(rho_in, &rho_b).expect("2x2 factors");
        let full = tensor_op(&rho_coin, &rho_ab).expect("2x4 factors");
        let evolved = &(&self.u8 * &full) * &self.u8.adjoint();
        partial_trace_parts(&evolved, 2, 4, false)
    }

    /// Affine channel of either output extracted from the dim-8
    /// evolution by probing.
    pub fn reduced_channel(&self, output: Keep) -> AffineChannel {
        let image_of = |r: &crate::bloch::BlochVector| {
            let rho = crate::bloch::bloch_to_density(r).expect("probe inside ball");
            let rho_ab = self.evolve_and_trace_coin(&rho);
            let reduced = partial_trace(&rho_ab, output).expect("dim 4");
            let mut out = [0.0; 3];
            for (j, oj) in out.iter_mut().enumerate() {
                *oj = (&crate::linalg::pauli(j + 1) * &reduced).trace().re;
            }
            out
        };
        let d = image_of(&crate::bloch::BlochVector([0.0, 0.0, 0.0]));
        let mut m = [[0.0; 3]; 3];
        for j in 0..3 {
            let mut probe = [0.0; 3];
            probe[j] = 1.0;
            let col = image_of(&crate::bloch::BlochVector(probe));
            for i in 0..3 {
                m[i][j] = col[i] - d[i];
            }
        }
        AffineChannel { m, d }
    }
}

/// Branch 1 of the centered copier as a gate-level circuit: the
/// canonical block at (gamma0, pi - delta0) followed by R(pi) on b.
pub fn centered_branch_circuit(gd0: &GammaDelta, branch: usize) -> crate::circuits::Circuit {
    use crate::circuits::{build_fig2a, Basis, Gate, Wire};
    match branch {
        0 => build_fig2a(gd0),
        1 => {
            let gd1 = GammaDelta::new(gd0.gamma, std::f64::consts::PI - gd0.delta);
            let mut c = build_fig2a(&gd1);
            c.gates.push(Gate::Rot {
                target: Wire::B,
                phi: std::f64::consts::PI,
                frame: Basis::Standard,
            });
            c
        }
        _ => panic!("two-branch copier"),
    }
}

/// Full input state of the embedding for a pure a input, coin leftmost.
pub fn embedding_input(emb: &CoinEmbedding, alpha: &CVec) -> CVec {
    let ab = tensor_vec(alpha, &emb.b_init).expect("2x2 factors");
    let mut out = CVec::zeros(8);
    for ci in 0..2 {
        for k in 0..4 {
            out.set(4 * ci + k, emb.coin_state.get(ci) * ab.get(k));
        }
    }
    let _ = C64::new(0.0, 0.0);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bloch::{canonical_channel, density_to_bloch, BlochVector};
    use crate::linalg::haar_random_state;
    use crate::stream::trial_rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_4, PI};

    #[test]
    fn single_branch_equals_plain_channel() {
        let gd = GammaDelta::new(0.9, 0.4);
        let v = canonical_isometry(gd.zeta(), gd.eta());
        let sc = StochasticCopier::new(vec![(1.0, v.clone())]).unwrap();
        for output in [Keep::A, Keep::B] {
            let avg = averaged_channel(&sc, output);
            let plain = channel_of_isometry(&v, output);
            assert!(avg.max_abs_diff(&plain) < 1e-14);
        }
    }

    #[test]
    fn identical_branches_collapse() {
        let gd = GammaDelta::new(0.5, 0.2);
        let v = canonical_isometry(gd.zeta(), gd.eta());
        let sc = StochasticCopier::new(vec![(0.5, v.clone()), (0.5, v.clone())]).unwrap();
        let avg = averaged_channel(&sc, Keep::A);
        let plain = channel_of_isometry(&v, Keep::A);
        assert!(avg.max_abs_diff(&plain) < 1e-14);
    }

    #[test]
    fn centered_copier_branch_identities() {
        // M1 = M0 and d1 = -d0, entrywise, across a grid
        for ig in 0..6 {
            for id in 0..6 {
                let gd = GammaDelta::new(PI * ig as f64 / 5.0, PI * id as f64 / 5.0);
                let sc = centered_copier(&gd, 0.5).unwrap();
                for output in [Keep::A, Keep::B] {
                    let ch0 = channel_of_isometry(&sc.branches()[0].1, output);
                    let ch1 = channel_of_isometry(&sc.branches()[1].1, output);
                    let mut worst: f64 = 0.0;
                    for i in 0..3 {
                        for j in 0..3 {
                            worst = worst.max((ch0.m[i][j] - ch1.m[i][j]).abs());
                        }
                        worst = worst.max((ch0.d[i] + ch1.d[i]).abs());
                    }
                    assert!(worst < 1e-10, "gamma={} delta={}", gd.gamma, gd.delta);
                }
            }
        }
    }

    #[test]
    fn centered_copier_at_half_is_centered() {
        let gd = GammaDelta::new(FRAC_PI_4, FRAC_PI_4);
        let sc = centered_copier(&gd, 0.5).unwrap();
        let s = 2f64.sqrt() / 2.0;
        for output in [Keep::A, Keep::B] {
            let avg = averaged_channel(&sc, output);
            let expect = AffineChannel {
                m: [[s, 0.0, 0.0], [0.0, s, 0.0], [0.0, 0.0, 0.5]],
                d: [0.0, 0.0, 0.0],
            };
            assert!(avg.max_abs_diff(&expect) < 1e-12);
        }
    }

    #[test]
    fn centered_copier_p_one_reduces_to_branch_zero() {
        let gd = GammaDelta::new(0.8, 0.3);
        let sc = centered_copier(&gd, 1.0).unwrap();
        let avg = averaged_channel(&sc, Keep::A);
        let plain = canonical_channel(&gd, Keep::A);
        assert!(avg.max_abs_diff(&plain) < 1e-12);
    }

    #[test]
    fn general_p_displacement_scales() {
        // averaged displacement is (2 p0 - 1) times the branch-0 one
        let gd = GammaDelta::new(0.7, 0.25);
        for p0 in [0.0, 0.3, 0.8] {
            let sc = centered_copier(&gd, p0).unwrap();
            for output in [Keep::A, Keep::B] {
                let avg = averaged_channel(&sc, output);
                let base = canonical_channel(&gd, output);
                for i in 0..3 {
                    assert!((avg.d[i] - (2.0 * p0 - 1.0) * base.d[i]).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn mixture_consistency_against_densities() {
        // Bloch image of the p-weighted density mixture equals the
        // averaged channel applied to the input vector
        let gd = GammaDelta::new(1.1, 0.6);
        let sc = centered_copier(&gd, 0.3).unwrap();
        let cha = averaged_channel(&sc, Keep::A);
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..100 {
            let s = haar_random_state(&mut rng);
            let rho = COp::outer(&s, &s);
            let mut mixed = COp::zeros(2);
            for (p, v) in sc.branches() {
                let (ra, _) = crate::linalg::apply_channel(v, &rho).unwrap();
                mixed = &mixed + &ra.scale(C64::new(*p, 0.0));
            }
            let got = density_to_bloch_loose(&mixed);
            let expect = cha.apply(&density_to_bloch(&rho).unwrap());
            for j in 0..3 {
                assert!((got[j] - expect.0[j]).abs() < 1e-10);
            }
        }
    }

    fn density_to_bloch_loose(rho: &COp) -> [f64; 3] {
        let mut r = [0.0; 3];
        for (j, rj) in r.iter_mut().enumerate() {
            *rj = (&crate::linalg::pauli(j + 1) * rho).trace().re;
        }
        r
    }

    #[test]
    fn coin_with_equal_branches_factors_out() {
        let gd = GammaDelta::new(0.6, 0.35);
        let u = centered_branch_circuit(&gd, 0).compile();
        let emb = coin_embedding(0.37, &u, &u, &CVec::basis(2, 0)).unwrap();
        assert!(emb.u8.is_unitary(1e-12));
        let v = centered_branch_circuit(&gd, 0).isometry();
        for output in [Keep::A, Keep::B] {
            let reduced = emb.reduced_channel(output);
            let plain = channel_of_isometry(&v, output);
            assert!(reduced.max_abs_diff(&plain) < 1e-10);
        }
    }

    #[test]
    fn coin_reproduces_averaged_channel() {
        let gd = GammaDelta::new(FRAC_PI_4, FRAC_PI_4);
        let u0 = centered_branch_circuit(&gd, 0).compile();
        let u1 = centered_branch_circuit(&gd, 1).compile();
        let emb = coin_embedding(0.5, &u0, &u1, &CVec::basis(2, 0)).unwrap();
        let sc = centered_copier(&gd, 0.5).unwrap();
        for output in [Keep::A, Keep::B] {
            let reduced = emb.reduced_channel(output);
            let avg = averaged_channel(&sc, output);
            assert!(reduced.max_abs_diff(&avg) < 1e-10);
            assert!(reduced.d.iter().all(|&x| x.abs() < 1e-10));
        }
    }

    #[test]
    fn coin_at_p_one_is_branch_zero() {
        let gd = GammaDelta::new(1.2, 0.2);
        let u0 = centered_branch_circuit(&gd, 0).compile();
        let u1 = centered_branch_circuit(&gd, 1).compile();
        let emb = coin_embedding(1.0, &u0, &u1, &CVec::basis(2, 0)).unwrap();
        let v0 = centered_branch_circuit(&gd, 0).isometry();
        let reduced = emb.reduced_channel(Keep::B);
        let plain = channel_of_isometry(&v0, Keep::B);
        assert!(reduced.max_abs_diff(&plain) < 1e-10);
    }

    #[test]
    fn sample_branch_degenerate_and_frequency() {
        let gd = GammaDelta::new(0.4, 0.1);
        let always0 = centered_copier(&gd, 1.0).unwrap();
        let mut rng = trial_rng(5, 0);
        for _ in 0..100 {
            assert_eq!(always0.sample_branch(&mut rng), 0);
        }

        let half = centered_copier(&gd, 0.5).unwrap();
        let n = 100_000u64;
        let mut ones = 0u64;
        for t in 0..n {
            let mut rng = trial_rng(6, t);
            ones += half.sample_branch(&mut rng) as u64;
        }
        let freq = ones as f64 / n as f64;
        let sigma = (0.25 / n as f64).sqrt();
        assert!((freq - 0.5).abs() < 4.0 * sigma, "freq = {freq}");
    }

    #[test]
    fn sample_branch_seed_determinism() {
        let gd = GammaDelta::new(0.4, 0.1);
        let sc = centered_copier(&gd, 0.5).unwrap();
        let run = || -> Vec<usize> {
            (0..200)
                .map(|t| sc.sample_branch(&mut trial_rng(9, t)))
                .collect()
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn embedding_input_layout() {
        let gd = GammaDelta::new(0.3, 0.1);
        let u = centered_branch_circuit(&gd, 0).compile();
        let emb = coin_embedding(0.25, &u, &u, &CVec::basis(2, 0)).unwrap();
        let alpha = CVec::basis(2, 1);
        let full = embedding_input(&emb, &alpha);
        // coin most significant: |c a b> with a = 1, b = 0
        assert!((full.get(2).re - 0.5).abs() < 1e-12); // c=0 slot, sqrt(0.25)
        assert!((full.get(6).re - 0.75f64.sqrt()).abs() < 1e-12); // c=1 slot
    }

    #[test]
    fn rejects_bad_probabilities() {
        let gd = GammaDelta::new(0.3, 0.1);
        let v = canonical_isometry(gd.zeta(), gd.eta());
        assert!(StochasticCopier::new(vec![(0.7, v.clone()), (0.7, v)]).is_err());
        assert!(centered_copier(&gd, 1.2).is_err());
    }
}
