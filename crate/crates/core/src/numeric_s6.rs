//! Floating-point octonion model of the round six-sphere, used as a
//! finite-difference oracle for the nearly Kaehler structure tensors.
//!
//! Octonions are pairs of quaternions with the Cayley–Dickson product
//!
//! ```text
//! (a, b)(c, d) = (ac - conj(d) b, d a + b conj(c))
//! ```
//!
//! over the Hamilton table `i j = k`. Component `0` is the real unit,
//! components `1..=3` are `i, j, k` of the first quaternion and `4..=7` are
//! `l, il, jl, kl` (the second quaternion times `l`). Imaginary octonions are
//! identified with `R^7` by dropping the real part, so `e_n` is component
//! `n`. With this table `e1 e2 = e3`, `e1 e4 = e5`, `e2 e4 = e6` and
//! `e3 e4 = e7`; the unit tests pin these.
//!
//! The sphere carries `J_p X = p x X` with `x y = (xy - yx) / 2`. Geodesics
//! and parallel transport along them are evaluated in closed form, so the
//! only error in the oracle is the finite-difference truncation.

use nalgebra::{SMatrix, SVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::report::{Item, Report, Residual};

pub type V7 = SVector<f64, 7>;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Octonion(pub [f64; 8]);

type Quat = [f64; 4];

fn qmul(a: &Quat, b: &Quat) -> Quat {
    [
        a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3],
        a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2],
        a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1],
        a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0],
    ]
}

fn qconj(a: &Quat) -> Quat {
    [a[0], -a[1], -a[2], -a[3]]
}

fn qsub(a: &Quat, b: &Quat) -> Quat {
    std::array::from_fn(|i| a[i] - b[i])
}

fn qadd(a: &Quat, b: &Quat) -> Quat {
    std::array::from_fn(|i| a[i] + b[i])
}

impl Octonion {
    pub fn unit(n: usize) -> Octonion {
        let mut c = [0.0; 8];
        c[n] = 1.0;
        Octonion(c)
    }

    pub fn imag(v: &V7) -> Octonion {
        let mut c = [0.0; 8];
        c[1..].copy_from_slice(v.as_slice());
        Octonion(c)
    }

    pub fn im(&self) -> V7 {
        V7::from_column_slice(&self.0[1..])
    }

    fn halves(&self) -> (Quat, Quat) {
        let c = &self.0;
        ([c[0], c[1], c[2], c[3]], [c[4], c[5], c[6], c[7]])
    }

    pub fn mul(&self, o: &Octonion) -> Octonion {
        let (a, b) = self.halves();
        let (c, d) = o.halves();
        let x = qsub(&qmul(&a, &c), &qmul(&qconj(&d), &b));
        let y = qadd(&qmul(&d, &a), &qmul(&b, &qconj(&c)));
        Octonion([x[0], x[1], x[2], x[3], y[0], y[1], y[2], y[3]])
    }

    pub fn conj(&self) -> Octonion {
        let mut c = self.0.map(|x| -x);
        c[0] = self.0[0];
        Octonion(c)
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

/// `x × y = (xy - yx) / 2` on imaginary octonions.
pub fn cross(x: &V7, y: &V7) -> V7 {
    let (ox, oy) = (Octonion::imag(x), Octonion::imag(y));
    (ox.mul(&oy).im() - oy.mul(&ox).im()) * 0.5
}

/// `<x, y> = -(xy + yx) / 2`, the real part.
pub fn inner(x: &V7, y: &V7) -> f64 {
    let (ox, oy) = (Octonion::imag(x), Octonion::imag(y));
    -(ox.mul(&oy).0[0] + oy.mul(&ox).0[0]) / 2.0
}

/// A point of the unit sphere in `Im O`.
#[derive(Clone, Copy, Debug)]
pub struct SpherePoint(V7);

impl SpherePoint {
    pub fn new(v: V7) -> SpherePoint {
        SpherePoint(v.normalize())
    }

    pub fn p(&self) -> &V7 {
        &self.0
    }

    pub fn tangent(&self, v: &V7) -> V7 {
        v - self.0 * self.0.dot(v)
    }

    pub fn j(&self, x: &V7) -> V7 {
        cross(&self.0, x)
    }

    /// Closed form of `(∇J)` at the point.
    pub fn g_exact(&self, x: &V7, y: &V7) -> V7 {
        self.tangent(&cross(x, y))
    }
}

/// Geodesic through `p` with initial velocity `x`, with a vector `y`
/// parallel transported along it; both evaluated at parameter `s`.
fn geodesic(p: &V7, x: &V7, y: &V7, s: f64) -> (V7, V7) {
    let len = x.norm();
    if len == 0.0 {
        return (*p, *y);
    }
    let u = x / len;
    let (c, sn) = ((s * len).cos(), (s * len).sin());
    let yu = y.dot(&u);
    (p * c + u * sn, y - u * yu + (u * c - p * sn) * yu)
}

/// Central difference of `(∇_X J) Y` along the geodesic in direction `X`.
pub fn fd_g(p: &SpherePoint, x: &V7, y: &V7, step: f64) -> V7 {
    let at = |s: f64| {
        let (q, ys) = geodesic(p.p(), x, y, s);
        cross(&q, &ys)
    };
    p.tangent(&((at(step) - at(-step)) / (2.0 * step)))
}

/// Nested central difference of `(∇_X G)(Y, Z)`: `Y` and `Z` are parallel
/// along the geodesic so only the derivative of `G(Y, Z)` survives.
pub fn fd_nabla_g(p: &SpherePoint, x: &V7, y: &V7, z: &V7, step: f64) -> V7 {
    let at = |s: f64| {
        let (q, ys) = geodesic(p.p(), x, y, s);
        let (_, zs) = geodesic(p.p(), x, z, s);
        fd_g(&SpherePoint(q), &ys, &zs, step)
    };
    p.tangent(&((at(step) - at(-step)) / (2.0 * step)))
}

/// Right side of the covariant derivative identity for `G`.
pub fn nabla_g_rhs(p: &SpherePoint, x: &V7, y: &V7, z: &V7) -> V7 {
    x * y.dot(&p.j(z)) + p.j(y) * x.dot(z) - p.j(z) * x.dot(y)
}

/// The slice `<x, e7> = t` of the sphere, a round five-sphere.
#[derive(Clone, Copy, Debug)]
pub struct Slice {
    pub t: f64,
    r: f64,
    e: V7,
}

impl Slice {
    pub fn new(t: f64) -> Slice {
        assert!((0.0..1.0).contains(&t), "slice height {t} outside [0, 1)");
        let mut e = V7::zeros();
        e[6] = 1.0;
        Slice { t, r: (1.0 - t * t).sqrt(), e }
    }

    /// Point of the slice over the direction `q` (projected orthogonal to `e`).
    pub fn point(&self, q: &V7) -> V7 {
        let q = (q - self.e * self.e.dot(q)).normalize();
        self.e * self.t + q * self.r
    }

    pub fn normal(&self, x: &V7) -> V7 {
        (self.e - x * self.t) / self.r
    }

    pub fn xi(&self, x: &V7) -> V7 {
        -cross(x, &self.normal(x))
    }

    pub fn project(&self, x: &V7, v: &V7) -> V7 {
        let n = self.normal(x);
        v - x * x.dot(v) - n * n.dot(v)
    }

    /// Great circle of the slice through `x` with initial velocity `v`.
    pub fn curve(&self, x: &V7, v: &V7, s: f64) -> V7 {
        let len = v.norm();
        if len == 0.0 {
            return *x;
        }
        let q = (x - self.e * self.t) / self.r;
        let w = len * s / self.r;
        self.e * self.t + (q * w.cos() + v / len * w.sin()) * self.r
    }

    pub fn phi(&self, i: usize, x: &V7, w: &V7) -> V7 {
        let n = self.normal(x);
        let xi = -cross(x, &n);
        let pt = SpherePoint(*x);
        match i {
            1 => cross(x, w) - n * w.dot(&xi),
            2 => pt.g_exact(&xi, w),
            3 => pt.g_exact(&n, w),
            _ => panic!("structure index {i} out of range"),
        }
    }

    /// Finite-difference Weingarten map: `S X = -(∇_X N)`.
    pub fn fd_shape(&self, x: &V7, v: &V7, step: f64) -> V7 {
        let dn = (self.normal(&self.curve(x, v, step)) - self.normal(&self.curve(x, v, -step))) / (2.0 * step);
        -self.project(x, &dn)
    }

    /// Orthonormal basis of the tangent space at `x`.
    pub fn frame(&self, x: &V7) -> [V7; 5] {
        let mut out: Vec<V7> = Vec::with_capacity(5);
        for k in 0..7 {
            let mut v = self.project(x, &V7::from_fn(|i, _| if i == k { 1.0 } else { 0.0 }));
            for b in &out {
                v -= b * b.dot(&v);
            }
            if v.norm() > 1e-6 {
                out.push(v.normalize());
            }
            if out.len() == 5 {
                break;
            }
        }
        out.try_into().expect("slice tangent space has dimension five")
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ShapeEstimate {
    pub spread: f64,
    pub mean: f64,
    pub asymmetry: f64,
}

/// Eigenvalue spread and mean of the measured shape operator at `x`.
pub fn geodesic_sphere_shape(t: f64, x: &V7, step: f64) -> ShapeEstimate {
    let slice = Slice::new(t);
    let f = slice.frame(x);
    let m = SMatrix::<f64, 5, 5>::from_fn(|i, j| slice.fd_shape(x, &f[i], step).dot(&f[j]));
    let sym = (m + m.transpose()) * 0.5;
    let ev = SymmetricEigen::new(sym).eigenvalues;
    ShapeEstimate {
        spread: ev.max() - ev.min(),
        mean: ev.mean(),
        asymmetry: (m - m.transpose()).abs().max(),
    }
}

/// `t / sqrt(1 - t^2)`, the principal curvature of the slice.
pub fn slice_curvature(t: f64) -> f64 {
    t / (1.0 - t * t).sqrt()
}

/// Finite-difference covariant derivative of `phi_i` on the slice.
#[derive(Clone, Copy, Debug)]
pub struct PhiDerivative {
    /// `(∇_X phi_i) Y` on the hypersurface.
    pub tangent: V7,
    /// Normal component of the ambient derivative of `phi_i Y`.
    pub normal: f64,
}

pub fn fd_covariant_phi(i: usize, t: f64, x: &V7, v: &V7, w: &V7, step: f64) -> PhiDerivative {
    let sl = Slice::new(t);
    let ext = |s: f64| {
        let c = sl.curve(x, v, s);
        let ws = sl.project(&c, w);
        (ws, sl.phi(i, &c, &ws))
    };
    let ((w1, a1), (w0, a0)) = (ext(step), ext(-step));
    let dphi = (a1 - a0) / (2.0 * step);
    let dw = sl.project(x, &((w1 - w0) / (2.0 * step)));
    PhiDerivative {
        tangent: sl.project(x, &dphi) - sl.phi(i, x, &dw),
        normal: dphi.dot(&sl.normal(x)),
    }
}

/// The closed formula for `(∇_X phi_i) Y`, tangent and normal parts together,
/// with the shape operator supplied by `shape`.
pub fn covariant_phi_formula(i: usize, t: f64, x: &V7, v: &V7, w: &V7, shape: &dyn Fn(&V7) -> V7) -> V7 {
    let sl = Slice::new(t);
    let pt = SpherePoint(*x);
    let n = sl.normal(x);
    let xi = sl.xi(x);
    let eta = |a: &V7| a.dot(&xi);
    let omega = |k: usize, a: &V7, b: &V7| sl.phi(k, x, a).dot(b);
    let sv = shape(v);
    match i {
        1 => pt.g_exact(v, w) - n * omega(3, v, w) + sv * eta(w) - xi * sv.dot(w),
        2 => {
            sl.phi(1, x, v) * eta(w) - sl.phi(1, x, w) * eta(v) - xi * omega(1, v, w)
                + n * omega(2, &sv, w)
                + pt.g_exact(&sl.phi(1, x, &sv), w)
                + sl.phi(3, x, w) * sv.dot(&xi)
        }
        3 => v * eta(w) - xi * v.dot(w) - pt.g_exact(&sv, w) + n * omega(3, &sv, w),
        _ => panic!("structure index {i} out of range"),
    }
}

/// Residual of one sampled check at a given step.
type StepResidual = dyn Fn(&mut ChaCha8Rng, f64) -> f64 + Sync;

#[derive(Clone, Copy, Debug)]
pub struct NumericConfig {
    pub seed: u64,
    pub step: f64,
    pub samples: usize,
    /// Replaces every finite-difference tolerance when set.
    pub tol: Option<f64>,
}

impl Default for NumericConfig {
    fn default() -> Self {
        NumericConfig { seed: 6, step: 1e-4, samples: 64, tol: None }
    }
}

impl NumericConfig {
    pub fn validate(&self) -> Result<(), String> {
        if !(1e-6..=1e-3).contains(&self.step) {
            return Err(format!("step {} outside [1e-6, 1e-3]", self.step));
        }
        if self.samples == 0 {
            return Err("sample count must be positive".into());
        }
        if let Some(t) = self.tol {
            if !(t.is_finite() && t > 0.0) {
                return Err(format!("tolerance {t} must be positive"));
            }
        }
        Ok(())
    }
}

/// Outcome of one sampled check: the worst residual over all samples.
#[derive(Clone, Debug)]
pub struct NumericCheck {
    pub id: String,
    pub residual: f64,
    pub tol: f64,
    pub passed: bool,
    pub note: String,
}

fn sample_rng(seed: u64, check: u64, k: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ check.wrapping_mul(0x9e37_79b9_7f4a_7c15));
    rng.set_stream(k as u64);
    rng
}

fn random_v7(rng: &mut ChaCha8Rng) -> V7 {
    loop {
        let v = V7::from_fn(|_, _| rng.gen_range(-1.0..1.0));
        if v.norm() > 0.1 {
            return v;
        }
    }
}

fn random_point(rng: &mut ChaCha8Rng) -> SpherePoint {
    SpherePoint::new(random_v7(rng))
}

fn orthonormal_pair(p: &SpherePoint, rng: &mut ChaCha8Rng) -> (V7, V7) {
    let x = p.tangent(&random_v7(rng)).normalize();
    let y = p.tangent(&random_v7(rng));
    (x, (y - x * x.dot(&y)).normalize())
}

/// Random point and tangent vector on the slice at height `t`.
fn slice_sample(t: f64, rng: &mut ChaCha8Rng) -> (V7, V7, V7) {
    let sl = Slice::new(t);
    let x = sl.point(&random_v7(rng));
    (x, sl.project(&x, &random_v7(rng)), sl.project(&x, &random_v7(rng)))
}

fn worst(samples: usize, seed: u64, check: u64, f: impl Fn(&mut ChaCha8Rng) -> f64 + Sync) -> f64 {
    (0..samples)
        .into_par_iter()
        .map(|k| f(&mut sample_rng(seed, check, k)))
        .collect::<Vec<_>>()
        .into_iter()
        .fold(0.0, f64::max)
}

fn g_norm_residual(rng: &mut ChaCha8Rng, step: f64) -> f64 {
    let p = random_point(rng);
    let (x, y) = orthonormal_pair(&p, rng);
    let g = fd_g(&p, &x, &y, step);
    (g.norm_squared() - (1.0 - p.j(&x).dot(&y).powi(2))).abs()
}

fn phi_derivative_residual(rng: &mut ChaCha8Rng, step: f64, i: usize, t: Option<f64>) -> f64 {
    let t = t.unwrap_or_else(|| rng.gen_range(0.0..0.9));
    let (x, v, w) = slice_sample(t, rng);
    let sl = Slice::new(t);
    let lhs = fd_covariant_phi(i, t, &x, &v, &w, step).tangent;
    let rhs = covariant_phi_formula(i, t, &x, &v, &w, &|a| sl.fd_shape(&x, a, step));
    (lhs - rhs).norm()
}

fn lambda_residual(rng: &mut ChaCha8Rng, step: f64, t: f64) -> f64 {
    let (x, _, _) = slice_sample(t, rng);
    (geodesic_sphere_shape(t, &x, step).mean - slice_curvature(t)).abs()
}

/// Runs every sampled check of the oracle.
pub fn run_checks(cfg: &NumericConfig) -> Vec<NumericCheck> {
    let (seed, h, n) = (cfg.seed, cfg.step, cfg.samples);
    let tol = |d: f64| cfg.tol.unwrap_or(d);
    let mut out = Vec::new();
    let mut push = |id: &str, residual: f64, tol: f64, note: String| {
        out.push(NumericCheck { id: id.into(), residual, tol, passed: residual < tol, note });
    };
    let per = format!("{n} samples, step {h:e}");

    let comp = worst(n, seed, 1, |r| {
        let (a, b) = (Octonion(std::array::from_fn(|_| r.gen_range(-1.0..1.0))), Octonion(std::array::from_fn(|_| r.gen_range(-1.0..1.0))));
        let (a, b) = (scale(&a, 1.0 / a.norm()), scale(&b, 1.0 / b.norm()));
        (a.mul(&b).norm() - 1.0).abs()
    });
    push("octonion.composition", comp, 1e-12, format!("{n} unit pairs"));

    let iso = worst(n, seed, 2, |r| {
        let p = random_point(r);
        let (x, y) = (p.tangent(&random_v7(r)), p.tangent(&random_v7(r)));
        (p.j(&x).dot(&p.j(&y)) - x.dot(&y)).abs() + p.j(&x).dot(p.p()).abs()
    });
    push("J.isometry", iso, 1e-12, format!("{n} tangent pairs"));

    let skew = worst(n, seed, 3, |r| {
        let p = random_point(r);
        let x = p.tangent(&random_v7(r));
        fd_g(&p, &x, &x, h).norm()
    });
    push("G.skew", skew, tol(1e-6), per.clone());

    let closed = worst(n, seed, 4, |r| {
        let p = random_point(r);
        let (x, y) = (p.tangent(&random_v7(r)), p.tangent(&random_v7(r)));
        (fd_g(&p, &x, &y, h) - p.g_exact(&x, &y)).norm()
    });
    push("G.closed-form", closed, tol(1e-5), per.clone());

    let e9 = worst(n, seed, 5, |r| g_norm_residual(r, h));
    push("G.norm", e9, tol(1e-5), format!("{per}, orthonormal X, Y"));

    let e10 = worst(n, seed, 6, |r| {
        let p = random_point(r);
        let [x, y, z, w] = std::array::from_fn(|_| p.tangent(&random_v7(r)));
        let lhs = fd_g(&p, &x, &y, h).dot(&fd_g(&p, &z, &w, h));
        let rhs = x.dot(&z) * y.dot(&w) - x.dot(&w) * y.dot(&z) + p.j(&x).dot(&z) * y.dot(&p.j(&w))
            - p.j(&x).dot(&w) * y.dot(&p.j(&z));
        (lhs - rhs).abs()
    });
    push("G.inner", e10, tol(1e-5), per.clone());

    let e11 = worst(n, seed, 7, |r| {
        let p = random_point(r);
        let [x, y, z] = std::array::from_fn(|_| p.tangent(&random_v7(r)));
        (fd_nabla_g(&p, &x, &y, &z, h) - nabla_g_rhs(&p, &x, &y, &z)).norm()
    });
    push("nabla-G", e11, tol(1e-4), format!("{per}, nested differences"));

    let e12 = worst(n, seed, 8, |r| {
        let p = random_point(r);
        let [x, y, z] = std::array::from_fn(|_| p.tangent(&random_v7(r)));
        let lhs = fd_g(&p, &fd_g(&p, &x, &y, h), &z, h);
        let rhs = y * x.dot(&z) - x * y.dot(&z) - p.j(&y) * p.j(&x).dot(&z) + p.j(&x) * p.j(&y).dot(&z);
        (lhs - rhs).norm()
    });
    push("G.double", e12, tol(1e-5), per.clone());

    let geo = worst(n, seed, 9, |r| {
        let (x, _, _) = slice_sample(0.0, r);
        geodesic_sphere_shape(0.0, &x, h).mean.abs()
    });
    push("slice.t0.totally-geodesic", geo, tol(1e-6), per.clone());

    let spread = worst(n, seed, 10, |r| {
        let t = r.gen_range(0.0..0.95);
        let (x, _, _) = slice_sample(t, r);
        let s = geodesic_sphere_shape(t, &x, h);
        s.spread.max(s.asymmetry)
    });
    push("slice.umbilic-spread", spread, tol(1e-6), format!("{per}, t in [0, 0.95)"));

    let l06 = worst(n, seed, 11, |r| lambda_residual(r, h, 0.6));
    push("slice.t0.6.lambda=0.75", l06, tol(1e-6), per.clone());

    let lt = worst(n, seed, 12, |r| {
        let t = r.gen_range(0.05..0.95);
        lambda_residual(r, h, t)
    });
    push("slice.lambda=t/sqrt(1-t^2)", lt, tol(1e-6), format!("{per}, t in [0.05, 0.95)"));

    // Gauss equation on the slice: K = 1 + lambda^2, strictly above one for t > 0.
    let gauss = (0..n)
        .into_par_iter()
        .map(|k| {
            let mut r = sample_rng(seed, 13, k);
            let t = r.gen_range(0.05..0.95);
            let (x, _, _) = slice_sample(t, &mut r);
            let l = geodesic_sphere_shape(t, &x, h).mean;
            1.0 + l * l
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    out.push(NumericCheck {
        id: "slice.gauss-curvature>1".into(),
        residual: gauss,
        tol: 1.0,
        passed: gauss > 1.0,
        note: format!("{per}, minimum of 1 + lambda^2 over t in [0.05, 0.95)"),
    });
    let mut push = |id: &str, residual: f64, tol: f64, note: String| {
        out.push(NumericCheck { id: id.into(), residual, tol, passed: residual < tol, note });
    };

    let sas = worst(n, seed, 14, |r| {
        let (x, v, w) = slice_sample(0.0, r);
        let sl = Slice::new(0.0);
        let lhs = fd_covariant_phi(3, 0.0, &x, &v, &w, h).tangent;
        (lhs - (v * w.dot(&sl.xi(&x)) - sl.xi(&x) * v.dot(&w))).norm()
    });
    push("phi-derivative.phi3.t0.sasakian", sas, tol(1e-5), per.clone());

    let p1 = worst(n, seed, 15, |r| phi_derivative_residual(r, h, 1, Some(0.0)));
    push("phi-derivative.phi1.t0", p1, tol(1e-5), per.clone());

    for i in 1..=3 {
        let e = worst(n, seed, 15 + i as u64, |r| phi_derivative_residual(r, h, i, None));
        push(&format!("phi-derivative.phi{i}.random-t"), e, tol(1e-5), format!("{per}, t in [0, 0.9)"));
    }

    let normal = worst(n, seed, 19, |r| {
        let t = r.gen_range(0.0..0.9);
        let (x, v, w) = slice_sample(t, r);
        let sl = Slice::new(t);
        let d = fd_covariant_phi(2, t, &x, &v, &w, h);
        let sv = sl.fd_shape(&x, &v, h);
        (-d.normal - sl.phi(2, &x, &sv).dot(&w)).abs()
    });
    push("phi-derivative.phi2.normal-coefficient", normal, tol(1e-5), format!("{per}, t in [0, 0.9)"));

    // Halving the step should divide the truncation error by four.
    let halving: [(&str, u64, &StepResidual); 3] = [
        ("G.norm", 5, &|r, s| g_norm_residual(r, s)),
        ("slice-lambda", 11, &|r, s| lambda_residual(r, s, 0.6)),
        ("phi-derivative.phi1", 16, &|r, s| phi_derivative_residual(r, s, 1, None)),
    ];
    for (name, check, f) in halving {
        let a = worst(n, seed, check, |r| f(r, h));
        let b = worst(n, seed, check, |r| f(r, h / 2.0));
        let ratio = a / b;
        out.push(NumericCheck {
            id: format!("convergence.{name}"),
            residual: ratio,
            tol: 4.0,
            passed: (3.5..=4.5).contains(&ratio),
            note: format!("residual {a:.3e} at step {h:e}, {b:.3e} at half step, ratio {ratio:.3}"),
        });
    }
    out
}

fn scale(o: &Octonion, k: f64) -> Octonion {
    Octonion(o.0.map(|x| x * k))
}

pub fn numeric_report(cfg: &NumericConfig) -> Report {
    let items = run_checks(cfg)
        .into_iter()
        .map(|c| {
            let bound = if c.id.starts_with("convergence.") {
                "ratio in [3.5, 4.5]".to_string()
            } else if c.id == "slice.gauss-curvature>1" {
                "minimum > 1".to_string()
            } else {
                format!("tolerance {:e}", c.tol)
            };
            Item::new(c.id, c.passed)
                .residual(Residual::Number(c.residual))
                .detail(format!("{}; {bound}", c.note))
        })
        .collect();
    Report::self_keyed("numeric-s6", items)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(n: usize) -> Octonion {
        Octonion::unit(n)
    }

    fn v(n: usize) -> V7 {
        e(n).im()
    }

    #[test]
    fn multiplication_table_is_pinned() {
        assert_eq!(e(1).mul(&e(2)), e(3));
        assert_eq!(e(2).mul(&e(3)), e(1));
        assert_eq!(e(1).mul(&e(4)), e(5));
        assert_eq!(e(2).mul(&e(4)), e(6));
        assert_eq!(e(3).mul(&e(4)), e(7));
        assert_eq!(e(5).mul(&e(1)), e(4));
        for n in 1..8 {
            assert_eq!(e(n).mul(&e(n)), scale(&e(0), -1.0));
        }
    }

    #[test]
    fn imaginary_units_anticommute() {
        for a in 1..8 {
            for b in 1..8 {
                if a != b {
                    let (x, y) = (e(a).mul(&e(b)), e(b).mul(&e(a)));
                    assert_eq!(x, scale(&y, -1.0));
                }
            }
        }
    }

    #[test]
    fn not_associative_but_alternative() {
        let (a, b, c) = (e(1), e(2), e(4));
        assert_ne!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        let x = Octonion([0.3, -1.0, 0.2, 0.7, 0.1, -0.4, 0.9, 0.5]);
        let y = Octonion([1.1, 0.6, -0.2, 0.3, -0.8, 0.2, 0.4, -0.1]);
        let l = x.mul(&x).mul(&y);
        let r = x.mul(&x.mul(&y));
        assert!(l.0.iter().zip(r.0).all(|(a, b)| (a - b).abs() < 1e-12));
    }

    #[test]
    fn conjugate_gives_norm() {
        let x = Octonion([0.3, -1.0, 0.2, 0.7, 0.1, -0.4, 0.9, 0.5]);
        let n = x.mul(&x.conj());
        assert!((n.0[0] - x.norm().powi(2)).abs() < 1e-12);
        assert!(n.0[1..].iter().all(|c| c.abs() < 1e-12));
    }

    #[test]
    fn cross_and_inner_products() {
        assert_eq!(cross(&v(1), &v(2)), v(3));
        assert_eq!(inner(&v(3), &v(3)), 1.0);
        assert_eq!(inner(&v(3), &v(5)), 0.0);
        let x = V7::from_column_slice(&[0.2, -0.5, 0.1, 0.9, 0.3, -0.7, 0.4]);
        let y = V7::from_column_slice(&[-0.6, 0.1, 0.8, 0.2, -0.3, 0.5, 0.1]);
        assert!((inner(&x, &y) - x.dot(&y)).abs() < 1e-14);
        assert!(cross(&x, &y).dot(&x).abs() < 1e-14);
    }

    #[test]
    fn j_squares_to_minus_one() {
        let p = SpherePoint::new(V7::from_column_slice(&[0.2, -0.5, 0.1, 0.9, 0.3, -0.7, 0.4]));
        let x = p.tangent(&V7::from_column_slice(&[-0.6, 0.1, 0.8, 0.2, -0.3, 0.5, 0.1]));
        assert!((p.j(&p.j(&x)) + x).norm() < 1e-14);
    }

    #[test]
    fn fd_g_matches_closed_form_at_basis_point() {
        let p = SpherePoint::new(v(7));
        let g = fd_g(&p, &v(1), &v(2), 1e-4);
        assert!((g - v(3)).norm() < 1e-8);
        assert!((p.g_exact(&v(1), &v(2)) - v(3)).norm() < 1e-15);
    }

    #[test]
    fn slice_geometry() {
        let sl = Slice::new(0.6);
        let x = sl.point(&V7::from_column_slice(&[1.0, 2.0, 0.0, -1.0, 0.5, 0.0, 3.0]));
        assert!((x.norm() - 1.0).abs() < 1e-14);
        assert!((x[6] - 0.6).abs() < 1e-14);
        let n = sl.normal(&x);
        assert!((n.norm() - 1.0).abs() < 1e-14 && n.dot(&x).abs() < 1e-14);
        let f = sl.frame(&x);
        for a in &f {
            assert!(a.dot(&x).abs() < 1e-12 && a.dot(&n).abs() < 1e-12);
        }
        let c = sl.curve(&x, &f[0], 0.3);
        assert!((c.norm() - 1.0).abs() < 1e-14 && (c[6] - 0.6).abs() < 1e-14);
    }

    #[test]
    fn slice_at_height_point_six() {
        let x = Slice::new(0.6).point(&v(1));
        let s = geodesic_sphere_shape(0.6, &x, 1e-4);
        assert!(s.spread < 1e-6);
        assert!((s.mean - 0.75).abs() < 1e-6);
    }

    #[test]
    fn phi_structures_are_almost_contact() {
        let sl = Slice::new(0.4);
        let x = sl.point(&V7::from_column_slice(&[0.3, 1.0, -0.2, 0.5, 0.1, 0.7, 0.0]));
        let xi = sl.xi(&x);
        let w = sl.project(&x, &V7::from_column_slice(&[0.9, -0.1, 0.4, 0.2, -0.6, 0.3, 0.5]));
        for i in 1..=3 {
            assert!(sl.phi(i, &x, &xi).norm() < 1e-12, "phi{i} xi");
            let pp = sl.phi(i, &x, &sl.phi(i, &x, &w));
            let want = -w + xi * w.dot(&xi);
            assert!((pp - want).norm() < 1e-12, "phi{i}");
            assert!(sl.phi(i, &x, &w).dot(&sl.normal(&x)).abs() < 1e-12);
        }
    }

    #[test]
    fn default_run_passes() {
        let checks = run_checks(&NumericConfig::default());
        for c in &checks {
            assert!(c.passed, "{} residual {:e} ({})", c.id, c.residual, c.note);
        }
    }

    #[test]
    fn report_is_deterministic() {
        let cfg = NumericConfig { samples: 8, ..NumericConfig::default() };
        assert_eq!(numeric_report(&cfg).to_json(), numeric_report(&cfg).to_json());
    }

    #[test]
    fn step_bounds_are_enforced() {
        assert!(NumericConfig { step: 1e-2, ..NumericConfig::default() }.validate().is_err());
        assert!(NumericConfig::default().validate().is_ok());
    }
}
