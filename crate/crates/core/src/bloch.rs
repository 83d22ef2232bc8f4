//! Bloch-sphere view of the copier outputs: density matrices as real
//! 3-vectors, each output qubit as an affine map r -> M r + d, and the
//! ellipsoid geometry those maps trace out inside the Bloch ball.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::canonical::canonical_isometry;
use crate::error::{Error, Result};
use crate::linalg::{apply_channel, pauli, COp, Isometry, Keep, C64};

/// Real 3-vector r with rho = (I + r.sigma)/2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochVector(pub [f64; 3]);

impl BlochVector {
    pub fn norm(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.0.iter().zip(&other.0).map(|(x, y)| x * y).sum()
    }
}

/// r_j = Tr(rho sigma_j).
pub fn density_to_bloch(rho: &COp) -> Result<BlochVector> {
    if !rho.is_density_2(1e-12) {
        return Err(Error::NotDensity("density_to_bloch needs a qubit density".into()));
    }
    let mut r = [0.0; 3];
    for (j, rj) in r.iter_mut().enumerate() {
        *rj = (&pauli(j + 1) * rho).trace().re;
    }
    Ok(BlochVector(r))
}

/// rho = (sigma_0 + r.sigma)/2; rejects vectors outside the unit ball.
pub fn bloch_to_density(r: &BlochVector) -> Result<COp> {
    let n = r.norm();
    if n > 1.0 + 1e-10 {
        return Err(Error::OutsideBlochBall(n));
    }
    let mut rho = COp::identity(2);
    for j in 0..3 {
        rho = &rho + &pauli(j + 1).scale(C64::new(r.0[j], 0.0));
    }
    Ok(rho.scale(C64::new(0.5, 0.0)))
}

/// The angle pair of the channel closed forms, gamma = (eta+zeta)/2 and
/// delta = (eta-zeta)/2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaDelta {
    pub gamma: f64,
    pub delta: f64,
}

impl GammaDelta {
    pub fn new(gamma: f64, delta: f64) -> Self {
        Self { gamma, delta }
    }

    pub fn from_zeta_eta(zeta: f64, eta: f64) -> Self {
        Self {
            gamma: 0.5 * (eta + zeta),
            delta: 0.5 * (eta - zeta),
        }
    }

    pub fn zeta(&self) -> f64 {
        self.gamma - self.delta
    }

    pub fn eta(&self) -> f64 {
        self.gamma + self.delta
    }

    /// The primed angles of the x/y-basis circuits.
    pub fn primed(&self) -> GammaDelta {
        use std::f64::consts::FRAC_PI_2;
        GammaDelta {
            gamma: FRAC_PI_2 - self.gamma,
            delta: FRAC_PI_2 - self.delta,
        }
    }
}

/// Affine Bloch-ball map r -> M r + d of one copier output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffineChannel {
    pub m: [[f64; 3]; 3],
    pub d: [f64; 3],
}

impl AffineChannel {
    pub fn apply(&self, r: &BlochVector) -> BlochVector {
        let mut out = self.d;
        for i in 0..3 {
            for j in 0..3 {
                out[i] += self.m[i][j] * r.0[j];
            }
        }
        BlochVector(out)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                worst = worst.max((self.m[i][j] - other.m[i][j]).abs());
            }
            worst = worst.max((self.d[i] - other.d[i]).abs());
        }
        worst
    }

    fn m_na(&self) -> Matrix3<f64> {
        Matrix3::from_fn(|i, j| self.m[i][j])
    }

    fn d_na(&self) -> Vector3<f64> {
        Vector3::from_column_slice(&self.d)
    }

    /// Largest output norm max_u |M u + d| over unit inputs, found by a
    /// spherical grid plus Newton refinement on the sphere.
    pub fn max_output_norm(&self) -> f64 {
        tangency_search(self)
            .iter()
            .map(|(_, _, f)| *f)
            .fold(0.0, f64::max)
            .sqrt()
    }
}

/// Extracts (M, d) by affine probing: d is the image of the maximally
/// mixed state and the columns of M are images of the axis probes minus
/// d. Exact for affine maps.
pub fn channel_of_isometry(v: &Isometry, output: Keep) -> AffineChannel {
    let pick = |pair: (COp, COp)| match output {
        Keep::A => pair.0,
        Keep::B => pair.1,
    };
    let image_of = |r: &BlochVector| -> BlochVector {
        let rho = bloch_to_density(r).expect("probe inside ball");
        let out = pick(apply_channel(v, &rho).expect("probe is a density"));
        bloch_of_output(&out)
    };
    let d = image_of(&BlochVector([0.0, 0.0, 0.0]));
    let mut m = [[0.0; 3]; 3];
    for j in 0..3 {
        let mut probe = [0.0; 3];
        probe[j] = 1.0;
        let col = image_of(&BlochVector(probe));
        for i in 0..3 {
            m[i][j] = col.0[i] - d.0[i];
        }
    }
    AffineChannel { m, d: d.0 }
}

// Outputs of a trace-preserving channel are densities, but roundoff can
// push the PSD check by a hair; read the Pauli components directly.
fn bloch_of_output(rho: &COp) -> BlochVector {
    let mut r = [0.0; 3];
    for (j, rj) in r.iter_mut().enumerate() {
        *rj = (&pauli(j + 1) * rho).trace().re;
    }
    BlochVector(r)
}

/// Closed-form channel of the canonical isometry:
/// output a has M = diag(sin g, sin d, sin g sin d), d = (0,0,cos g cos d);
/// output b has M = diag(cos d, cos g, cos g cos d), d = (0,0,sin g sin d).
pub fn canonical_channel(gd: &GammaDelta, output: Keep) -> AffineChannel {
    let (sg, cg) = gd.gamma.sin_cos();
    let (sd, cd) = gd.delta.sin_cos();
    match output {
        Keep::A => AffineChannel {
            m: [[sg, 0.0, 0.0], [0.0, sd, 0.0], [0.0, 0.0, sg * sd]],
            d: [0.0, 0.0, cg * cd],
        },
        Keep::B => AffineChannel {
            m: [[cd, 0.0, 0.0], [0.0, cg, 0.0], [0.0, 0.0, cg * cd]],
            d: [0.0, 0.0, sg * sd],
        },
    }
}

/// Ellipsoid geometry of one channel: principal semi-axes (singular
/// values of M, sorted descending), the orthonormal axis frame, the
/// center, and the points where the ellipsoid touches the Bloch sphere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EllipsoidReport {
    pub semi_axes: [f64; 3],
    pub axis_directions: [[f64; 3]; 3],
    pub center: [f64; 3],
    pub tangency_points: Vec<[f64; 3]>,
    /// Set when the ellipsoid is the whole Bloch sphere and every point
    /// is a touching point.
    pub tangency_degenerate: bool,
}

const TANGENCY_EPS: f64 = 1e-8;

/// Stationary points of |M u + d|^2 on the unit sphere: coarse grid,
/// Newton refinement in the tangent plane, then clustering.
fn tangency_search(ch: &AffineChannel) -> Vec<(Vector3<f64>, Vector3<f64>, f64)> {
    let m = ch.m_na();
    let d = ch.d_na();
    let a = m.transpose() * m;
    let cvec = m.transpose() * d;
    let f = |u: &Vector3<f64>| (m * u + d).norm_squared();

    let refine = |start: Vector3<f64>| -> Vector3<f64> {
        let mut u = start.normalize();
        for _ in 0..50 {
            let grad_full = 2.0 * (a * u + cvec);
            // tangent basis at u
            let t1 = if u.x.abs() < 0.9 {
                Vector3::x().cross(&u).normalize()
            } else {
                Vector3::y().cross(&u).normalize()
            };
            let t2 = u.cross(&t1);
            let g1 = t1.dot(&grad_full);
            let g2 = t2.dot(&grad_full);
            let curv = grad_full.dot(&u);
            let h11 = 2.0 * (t1.dot(&(a * t1))) - curv;
            let h12 = 2.0 * (t1.dot(&(a * t2)));
            let h22 = 2.0 * (t2.dot(&(a * t2))) - curv;
            let det = h11 * h22 - h12 * h12;
            let (s1, s2) = if det.abs() > 1e-14 {
                (-(h22 * g1 - h12 * g2) / det, -(h11 * g2 - h12 * g1) / det)
            } else {
                (0.05 * g1, 0.05 * g2)
            };
            let (s1, s2) = if (s1 * s1 + s2 * s2).sqrt() > 0.5 {
                // cap the Newton step; fall back toward gradient ascent
                let n = (s1 * s1 + s2 * s2).sqrt();
                (0.5 * s1 / n, 0.5 * s2 / n)
            } else {
                (s1, s2)
            };
            let next = (u + s1 * t1 + s2 * t2).normalize();
            if f(&next) >= f(&u) || det.abs() <= 1e-14 {
                u = next;
            } else {
                break;
            }
        }
        u
    };

    let mut found: Vec<(Vector3<f64>, Vector3<f64>, f64)> = Vec::new();
    let (n_theta, n_phi) = (32, 64);
    for it in 0..n_theta {
        let theta = std::f64::consts::PI * (it as f64 + 0.5) / n_theta as f64;
        for ip in 0..n_phi {
            let phi = 2.0 * std::f64::consts::PI * ip as f64 / n_phi as f64;
            let seed = Vector3::new(theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos());
            // refine only seeds already near the global maximum band
            if f(&seed) < 0.90 {
                continue;
            }
            let u = refine(seed);
            let val = f(&u);
            let out = m * u + d;
            // near a coalesced tangency the maximum is quartically flat,
            // so refined hits scatter; cluster with a loose radius and
            // keep the best representative
            match found
                .iter_mut()
                .find(|(_, o, _)| (*o - out).norm() < 5e-2)
            {
                Some(entry) => {
                    if val > entry.2 {
                        *entry = (u, out, val);
                    }
                }
                None => found.push((u, out, val)),
            }
        }
    }
    found
}

/// Builds the full geometric report for a channel.
pub fn ellipsoid_report(ch: &AffineChannel) -> EllipsoidReport {
    let m = ch.m_na();
    let svd = m.svd(true, false);
    let u = svd.u.expect("u requested");
    let mut order: Vec<usize> = (0..3).collect();
    let sv = svd.singular_values;
    order.sort_by(|&i, &j| sv[j].partial_cmp(&sv[i]).unwrap());
    let mut semi_axes = [0.0; 3];
    let mut axis_directions = [[0.0; 3]; 3];
    for (slot, &idx) in order.iter().enumerate() {
        semi_axes[slot] = sv[idx];
        let col = u.column(idx);
        axis_directions[slot] = [col[0], col[1], col[2]];
    }

    // whole-sphere case: all axes 1 and centered
    let degenerate = semi_axes.iter().all(|&s| (s - 1.0).abs() <= TANGENCY_EPS)
        && ch.d.iter().all(|&x| x.abs() <= TANGENCY_EPS);

    let mut tangency_points: Vec<[f64; 3]> = Vec::new();
    if !degenerate {
        let mut hits: Vec<(Vector3<f64>, f64)> = tangency_search(ch)
            .into_iter()
            .filter(|(_, _, val)| (val.sqrt() - 1.0).abs() <= TANGENCY_EPS)
            .map(|(_, out, val)| (out, val))
            .collect();
        hits.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());
        for (out, _) in hits.into_iter().take(2) {
            tangency_points.push([out[0], out[1], out[2]]);
        }
    }

    EllipsoidReport {
        semi_axes,
        axis_directions,
        center: ch.d,
        tangency_points,
        tangency_degenerate: degenerate,
    }
}

/// The squared-amplitude split of the canonical channel over half
/// angles; the four values always satisfy sum of squares = 1.
pub fn optimality_betas(gd: &GammaDelta) -> [f64; 4] {
    let (sg, cg) = (0.5 * gd.gamma).sin_cos();
    let (sd, cd) = (0.5 * gd.delta).sin_cos();
    [cd * cg, cd * sg, sd * cg, sd * sg]
}

/// Convenience: probed channel of the canonical isometry at (zeta, eta)
/// derived from the given (gamma, delta).
pub fn probed_canonical_channel(gd: &GammaDelta, output: Keep) -> AffineChannel {
    let v = canonical_isometry(gd.zeta(), gd.eta());
    channel_of_isometry(&v, output)
}
