//! Floating-point instantiation of each lemma frame inside the explicit point
//! model, compared with the frame-coordinate data of [`crate::frames`].

use std::collections::HashMap;

use nalgebra::{Matrix6, Vector6};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{build_model, dot, lin, NumModel, V6};
use crate::frames::{build_frame, s3s3_dependent_frame, FrameCase, HypersurfaceFrame};
use crate::report::{Item, Residual};
use crate::tensor::DIM;

const TOL: f64 = 1e-10;
const GENERIC: f64 = 1e-6;

/// A unit normal and the auxiliary vectors a lemma chooses.
///
/// * s3s3-dependent: `[V1, V2]`, eigenvectors of `P` orthogonal to `N, JN`.
/// * cp3-d1, cp3-d2: `[V]`, unit in the other distribution.
/// * flag-d1: `[U, V]`, unit in `D2` and `D3`.
/// * flag-d1d2: `[V]`, unit in `D3`.
/// * the remaining cases take everything from `N`.
#[derive(Clone, Debug)]
pub struct Instance {
    pub normal: V6,
    pub aux: Vec<V6>,
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum CrossCheckError {
    #[error("normal is not a unit vector (|N|^2 = {0})")]
    NotUnit(f64),
    #[error("expected {expected} auxiliary vectors, got {got}")]
    AuxCount { expected: usize, got: usize },
    #[error("genericity hypothesis fails: {0}")]
    Degenerate(String),
}

/// Measured agreement of one instantiated frame.
#[derive(Clone, Debug)]
pub struct CrossCheck {
    pub case: FrameCase,
    pub gram: f64,
    pub j: f64,
    pub aux: Vec<(&'static str, f64)>,
    pub values: Vec<(String, f64)>,
}

impl CrossCheck {
    pub fn worst(&self) -> f64 {
        self.aux.iter().map(|a| a.1).fold(self.gram.max(self.j), f64::max)
    }

    pub fn passed(&self) -> bool {
        self.worst() < TOL
    }
}

fn to_mat(a: &[[f64; DIM]; DIM]) -> Matrix6<f64> {
    Matrix6::from_fn(|i, j| a[i][j])
}

fn scale(k: f64, x: &V6) -> V6 {
    x.map(|c| k * c)
}

fn norm(x: &V6) -> f64 {
    dot(x, x).sqrt()
}

/// Projection onto the model coordinates in `idx`.
fn part(x: &V6, idx: &[usize]) -> V6 {
    std::array::from_fn(|i| if idx.contains(&i) { x[i] } else { 0.0 })
}

fn require(ok: bool, what: &str) -> Result<(), CrossCheckError> {
    if ok {
        Ok(())
    } else {
        Err(CrossCheckError::Degenerate(what.to_string()))
    }
}

struct Built {
    frame: [V6; DIM],
    values: Vec<(String, f64)>,
    eigen: i64,
}

const D: [[usize; 2]; 3] = [[0, 1], [2, 3], [4, 5]];
const CP3_D2: [usize; 4] = [2, 3, 4, 5];

fn in_span(x: &V6, idx: &[usize]) -> bool {
    norm(&lin(&[(1.0, x), (-1.0, &part(x, idx))])) < GENERIC
}

fn build(m: &NumModel, case: FrameCase, inst: &Instance) -> Result<Built, CrossCheckError> {
    let n = inst.normal;
    let nn = dot(&n, &n);
    if (nn - 1.0).abs() > 1e-12 {
        return Err(CrossCheckError::NotUnit(nn));
    }
    let expected = match case {
        FrameCase::S3S3Dependent | FrameCase::FlagD1 => 2,
        FrameCase::CP3D1 | FrameCase::CP3D2 | FrameCase::FlagD1D2 => 1,
        _ => 0,
    };
    if inst.aux.len() != expected {
        return Err(CrossCheckError::AuxCount { expected, got: inst.aux.len() });
    }
    let j = |x: &V6| m.j(x);
    let g = |x: &V6, y: &V6| m.gt(x, y);
    let jn = j(&n);
    let mut values = Vec::new();
    let mut eigen = 1;
    let frame = match case {
        FrameCase::S3S3Independent => {
            let pn = NumModel::apply(&m.aux[0], &n);
            let (t1, t2) = (dot(&pn, &n), dot(&pn, &jn));
            let rho = 1.0 - t1 * t1 - t2 * t2;
            require(rho > GENERIC, "PN must be independent of N and JN")?;
            let vv = lin(&[(1.0, &pn), (-t1, &n), (-t2, &jn)]);
            values = vec![("t1".into(), t1), ("t2".into(), t2), ("rho".into(), rho)];
            let gv = g(&vv, &n);
            [jn, vv, j(&vv), gv, j(&gv), n]
        }
        FrameCase::S3S3Dependent => {
            let p = &m.aux[0];
            let pn = NumModel::apply(p, &n);
            let (c, s) = (dot(&pn, &n), dot(&pn, &jn));
            require((c * c + s * s - 1.0).abs() < GENERIC, "PN must lie in span{N, JN}")?;
            let [v1, v2] = [inst.aux[0], inst.aux[1]];
            for x in [&v1, &v2] {
                require((dot(x, x) - 1.0).abs() < 1e-12, "V1, V2 must be unit")?;
                require(dot(x, &n).abs() < GENERIC && dot(x, &jn).abs() < GENERIC, "V1, V2 must be tangent to span{N, JN}^perp")?;
            }
            require(dot(&v1, &v2).abs() < GENERIC && dot(&j(&v1), &v2).abs() < GENERIC, "V1, JV1, V2 must be orthonormal")?;
            require(norm(&lin(&[(1.0, &NumModel::apply(p, &v1)), (-1.0, &v1)])) < GENERIC, "PV1 = V1 required")?;
            let pv2 = NumModel::apply(p, &v2);
            eigen = if norm(&lin(&[(1.0, &pv2), (-1.0, &v2)])) < GENERIC {
                1
            } else if norm(&lin(&[(1.0, &pv2), (1.0, &v2)])) < GENERIC {
                -1
            } else {
                return Err(CrossCheckError::Degenerate("V2 must be an eigenvector of P".into()));
            };
            values = vec![("cos(t)".into(), c), ("sin(t)".into(), s)];
            [jn, v1, v2, j(&v1), j(&v2), n]
        }
        FrameCase::CP3D1 | FrameCase::CP3D2 => {
            let (nd, vd): (&[usize], &[usize]) = if case == FrameCase::CP3D1 { (&D[0], &CP3_D2) } else { (&CP3_D2, &D[0]) };
            let vv = inst.aux[0];
            require(in_span(&n, nd), "N must lie in its distribution")?;
            require(in_span(&vv, vd) && (dot(&vv, &vv) - 1.0).abs() < 1e-12, "V must be unit in the other distribution")?;
            let gv = g(&vv, &n);
            [jn, vv, j(&vv), gv, j(&gv), n]
        }
        FrameCase::CP3Mixed => {
            let (v1, v2) = (part(&n, &D[0]), part(&n, &CP3_D2));
            let (c, s) = (norm(&v1), norm(&v2));
            require(c > GENERIC && s > GENERIC, "N must have nonzero D1 and D2 components")?;
            values = vec![("cos(t)".into(), c), ("sin(t)".into(), s)];
            let g12 = g(&v1, &v2);
            let v3 = g(&g12, &n);
            [j(&v1), j(&v2), v3, g12, j(&g12), n]
        }
        FrameCase::FlagD1 => {
            let [u, vv] = [inst.aux[0], inst.aux[1]];
            require(in_span(&n, &D[0]), "N must lie in D1")?;
            require(in_span(&u, &D[1]) && in_span(&vv, &D[2]), "U, V must lie in D2, D3")?;
            require((dot(&u, &u) - 1.0).abs() < 1e-12 && (dot(&vv, &vv) - 1.0).abs() < 1e-12, "U, V must be unit")?;
            [jn, u, j(&u), vv, j(&vv), n]
        }
        FrameCase::FlagD1D2 => {
            let vv = inst.aux[0];
            let (n1, n2) = (part(&n, &D[0]), part(&n, &D[1]));
            let (c, s) = (norm(&n1), norm(&n2));
            require(norm(&part(&n, &D[2])) < GENERIC, "N must lie in D1 + D2")?;
            require(c > GENERIC && s > GENERIC, "N must have nonzero D1 and D2 components")?;
            require(in_span(&vv, &D[2]) && (dot(&vv, &vv) - 1.0).abs() < 1e-12, "V must be unit in D3")?;
            let jj1n = j(&NumModel::apply(&m.aux[0], &n));
            let (ct, st) = (dot(&jj1n, &n), 2.0 * s * c);
            let u = scale(1.0 / st, &lin(&[(1.0, &jj1n), (-ct, &n)]));
            values = vec![("cos(phi)".into(), c), ("sin(phi)".into(), s)];
            [jn, u, j(&u), vv, j(&vv), n]
        }
        FrameCase::FlagD1D2D3 => {
            let [a, b, c] = D.map(|d| part(&n, &d));
            let (c1, s1) = (norm(&a), (1.0 - dot(&a, &a)).sqrt());
            require(c1 > GENERIC && s1 > GENERIC, "N must have nonzero D1 component and be off D1")?;
            let (s2, c2) = (norm(&b) / s1, norm(&c) / s1);
            require(s2 > GENERIC && c2 > GENERIC, "N must have nonzero D2 and D3 components")?;
            let [v1, v2, v3] = [scale(1.0 / c1, &a), scale(1.0 / (s1 * s2), &b), scale(1.0 / (s1 * c2), &c)];
            let w = lin(&[(s2, &v2), (c2, &v3)]);
            let u1 = lin(&[(c2, &v2), (-s2, &v3)]);
            let u2 = lin(&[(s1, &v1), (-c1, &w)]);
            values = vec![
                ("cos(t1)".into(), c1),
                ("sin(t1)".into(), s1),
                ("cos(t2)".into(), c2),
                ("sin(t2)".into(), s2),
            ];
            [j(&v1), j(&v2), j(&v3), u1, u2, n]
        }
    };
    Ok(Built { frame, values, eigen })
}

/// Instantiates the frame of `case` in the point model at `inst` and
/// measures its Gram matrix, `J` and auxiliary tensors against the frame
/// data used by the tables.
pub fn frame_cross_check(case: FrameCase, inst: &Instance) -> Result<CrossCheck, CrossCheckError> {
    let model = build_model(case.space());
    let m = NumModel::new(&model);
    let built = build(&m, case, inst)?;
    let fr: HypersurfaceFrame = if case == FrameCase::S3S3Dependent {
        s3s3_dependent_frame(built.eigen)
    } else {
        build_frame(case)
    };
    measure(&m, case, built, &fr)
}

fn measure(m: &NumModel, case: FrameCase, built: Built, fr: &HypersurfaceFrame) -> Result<CrossCheck, CrossCheckError> {
    let names: HashMap<&str, f64> = built.values.iter().map(|(k, x)| (k.as_str(), *x)).collect();
    let val = |s| {
        let name = fr.field.name(s);
        *names.get(name).unwrap_or_else(|| panic!("no value for frame symbol {name}"))
    };
    let f = Matrix6::from_fn(|i, j| built.frame[j][i]);
    let gram = f.transpose() * f;
    let want_gram = Matrix6::from_diagonal(&Vector6::from_fn(|i, _| fr.norms()[i].eval(&val)));
    let inv = gram.try_inverse().ok_or_else(|| CrossCheckError::Degenerate("frame vectors are dependent".into()))?;
    // A E_j = sum_i c_ij E_i  =>  c = Gram^-1 F^T A F
    let in_frame = |a: &Matrix6<f64>| inv * f.transpose() * a * f;
    let j_err = (in_frame(&to_mat(&m.j)) - to_mat(&fr.j().eval(&val))).abs().max();
    let aux = fr
        .geom
        .aux
        .named()
        .into_iter()
        .zip(&m.aux)
        .map(|((name, mat), a)| (name, (in_frame(&to_mat(a)) - to_mat(&mat.eval(&val))).abs().max()))
        .collect();
    Ok(CrossCheck {
        case,
        gram: (gram - want_gram).abs().max(),
        j: j_err,
        aux,
        values: built.values,
    })
}

fn unit_in(rng: &mut ChaCha8Rng, idx: &[usize]) -> V6 {
    loop {
        let x: V6 = std::array::from_fn(|i| if idx.contains(&i) { rng.gen_range(-1.0..1.0) } else { 0.0 });
        let r = norm(&x);
        if r > 0.1 {
            return scale(1.0 / r, &x);
        }
    }
}

/// A generic instance of `case` drawn from `seed`.
pub fn sample_instance(case: FrameCase, seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let all = [0, 1, 2, 3, 4, 5];
    let (normal, aux) = match case {
        FrameCase::S3S3Independent | FrameCase::CP3Mixed | FrameCase::FlagD1D2D3 => (unit_in(&mut rng, &all), vec![]),
        FrameCase::S3S3Dependent => {
            // P = -1 on f_i and +1 on Jf_i; N in a complex line is P-dependent
            let a: f64 = rng.gen_range(0.2..1.3);
            let b: f64 = rng.gen_range(0.2..1.3);
            let n = [a.cos(), a.sin(), 0.0, 0.0, 0.0, 0.0];
            let v1 = [0.0, 0.0, 0.0, b.cos(), 0.0, b.sin()];
            let v2 = [0.0, 0.0, 0.0, -b.sin(), 0.0, b.cos()];
            (n, vec![v1, v2])
        }
        FrameCase::CP3D1 => (unit_in(&mut rng, &D[0]), vec![unit_in(&mut rng, &CP3_D2)]),
        FrameCase::CP3D2 => (unit_in(&mut rng, &CP3_D2), vec![unit_in(&mut rng, &D[0])]),
        FrameCase::FlagD1 => (unit_in(&mut rng, &D[0]), vec![unit_in(&mut rng, &D[1]), unit_in(&mut rng, &D[2])]),
        FrameCase::FlagD1D2 => (unit_in(&mut rng, &[0, 1, 2, 3]), vec![unit_in(&mut rng, &D[2])]),
    };
    Instance { normal, aux }
}

/// Cross-check items for every frame case at a sampled instance.
pub fn cross_check_items(seed: u64) -> Vec<Item> {
    FrameCase::ALL
        .iter()
        .map(|&case| {
            let id = format!("frame-cross-check.{case}");
            match frame_cross_check(case, &sample_instance(case, seed)) {
                Ok(c) => {
                    let aux: Vec<String> = c.aux.iter().map(|(n, e)| format!("{n} {e:.1e}")).collect();
                    Item::new(id, c.passed())
                        .residual(Residual::Number(c.worst()))
                        .detail(format!("gram {:.1e}, J {:.1e}, {}; tolerance {TOL:e}", c.gram, c.j, aux.join(", ")))
                }
                Err(e) => Item::new(id, false).detail(e.to_string()),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvature::Space;

    fn e(i: usize) -> V6 {
        super::super::unit(i)
    }

    #[test]
    fn cp3_d1_frame_is_orthonormal() {
        let c = frame_cross_check(FrameCase::CP3D1, &Instance { normal: e(0), aux: vec![e(2)] }).unwrap();
        assert!(c.gram < 1e-14 && c.passed(), "{c:?}");
    }

    #[test]
    fn every_case_matches_at_sampled_instances() {
        for seed in 0..5 {
            for case in FrameCase::ALL {
                let c = frame_cross_check(case, &sample_instance(case, seed)).unwrap();
                assert!(c.passed(), "{case} seed {seed}: {c:?}");
            }
        }
    }

    #[test]
    fn dependent_case_eigenvalues_follow_the_choice_of_v2() {
        let n = e(0);
        // P = +1 on Jf_i, -1 on f_i
        let plus = Instance { normal: n, aux: vec![e(3), e(5)] };
        let c = frame_cross_check(FrameCase::S3S3Dependent, &plus).unwrap();
        assert!(c.passed());
        let mixed = Instance { normal: n, aux: vec![e(3), e(4)] };
        let c = frame_cross_check(FrameCase::S3S3Dependent, &mixed).unwrap();
        assert!(c.passed(), "{c:?}");
        let fr = s3s3_dependent_frame(-1);
        let p = fr.aux("P").unwrap();
        let diag: Vec<String> = (1..5).map(|i| p.entry(i, i).to_string()).collect();
        assert_eq!(diag, ["1", "-1", "-1", "1"]);
        // the other eigenvalue assignment must not match this instance
        let m = NumModel::new(&build_model(Space::S3xS3));
        let built = build(&m, FrameCase::S3S3Dependent, &mixed).unwrap();
        let wrong = measure(&m, FrameCase::S3S3Dependent, built, &s3s3_dependent_frame(1)).unwrap();
        assert!(!wrong.passed());
    }

    #[test]
    fn independent_case_reports_angles() {
        let case = FrameCase::S3S3Independent;
        let c = frame_cross_check(case, &sample_instance(case, 11)).unwrap();
        let rho = c.values.iter().find(|(k, _)| k == "rho").unwrap().1;
        assert!(rho > 0.0 && rho < 1.0);
        assert!(c.passed(), "{c:?}");
    }

    #[test]
    fn degenerate_instances_are_rejected() {
        // PN = -N for N = f1: dependent, so the independent lemma does not apply
        let err = frame_cross_check(FrameCase::S3S3Independent, &Instance { normal: e(0), aux: vec![] });
        assert!(matches!(err, Err(CrossCheckError::Degenerate(_))));
        let err = frame_cross_check(FrameCase::CP3D1, &Instance { normal: e(2), aux: vec![e(4)] });
        assert!(matches!(err, Err(CrossCheckError::Degenerate(_))));
        let err = frame_cross_check(FrameCase::CP3Mixed, &Instance { normal: e(1), aux: vec![] });
        assert!(matches!(err, Err(CrossCheckError::Degenerate(_))));
        let err = frame_cross_check(FrameCase::FlagD1, &Instance { normal: scale(2.0, &e(0)), aux: vec![e(2), e(4)] });
        assert!(matches!(err, Err(CrossCheckError::NotUnit(_))));
        let err = frame_cross_check(FrameCase::FlagD1, &Instance { normal: e(0), aux: vec![e(2)] });
        assert!(matches!(err, Err(CrossCheckError::AuxCount { .. })));
    }
}
