//! Hypersurface frames `{E_1..E_5, N}` in frame coordinates: diagonal Gram
//! matrix, `J` and the auxiliary tensors of the ambient space.

use std::fmt::{self, Write as _};
use std::str::FromStr;
use std::sync::Arc;

use serde::Serialize;

use crate::curvature::{Aux, Geometry, Space};
use crate::pointmodel::IdentityCheck;
use crate::scalar::{Field, FieldBuilder, Rational, Scalar, Sym};
use crate::tensor::{combine, Matrix, Metric, Vector, DIM};

/// The eight frame configurations, one per table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum FrameCase {
    /// `PN` independent of `N, JN`.
    S3S3Independent,
    /// `PN = cos t N + sin t JN`.
    S3S3Dependent,
    CP3D1,
    CP3D2,
    /// `N = V1 + V2` with `V_i` in `D_i`.
    CP3Mixed,
    FlagD1,
    FlagD1D2,
    FlagD1D2D3,
}

impl FrameCase {
    pub const ALL: [FrameCase; 8] = [
        FrameCase::S3S3Independent,
        FrameCase::S3S3Dependent,
        FrameCase::CP3D1,
        FrameCase::CP3D2,
        FrameCase::CP3Mixed,
        FrameCase::FlagD1,
        FrameCase::FlagD1D2,
        FrameCase::FlagD1D2D3,
    ];

    pub fn table(self) -> usize {
        FrameCase::ALL.iter().position(|c| *c == self).unwrap() + 1
    }

    pub fn for_table(k: usize) -> Option<FrameCase> {
        k.checked_sub(1).and_then(|i| FrameCase::ALL.get(i).copied())
    }

    pub fn id(self) -> &'static str {
        match self {
            FrameCase::S3S3Independent => "s3s3-independent",
            FrameCase::S3S3Dependent => "s3s3-dependent",
            FrameCase::CP3D1 => "cp3-d1",
            FrameCase::CP3D2 => "cp3-d2",
            FrameCase::CP3Mixed => "cp3-mixed",
            FrameCase::FlagD1 => "flag-d1",
            FrameCase::FlagD1D2 => "flag-d1d2",
            FrameCase::FlagD1D2D3 => "flag-d1d2d3",
        }
    }

    pub fn space(self) -> Space {
        match self {
            FrameCase::S3S3Independent | FrameCase::S3S3Dependent => Space::S3xS3,
            FrameCase::CP3D1 | FrameCase::CP3D2 | FrameCase::CP3Mixed => Space::CP3,
            _ => Space::FlagC3,
        }
    }

    pub fn labels(self) -> [&'static str; DIM] {
        match self {
            FrameCase::S3S3Independent | FrameCase::CP3D1 | FrameCase::CP3D2 => {
                ["JN", "V", "JV", "G(V,N)", "JG(V,N)", "N"]
            }
            FrameCase::S3S3Dependent => ["JN", "V1", "V2", "JV1", "JV2", "N"],
            FrameCase::CP3Mixed => ["JV1", "JV2", "V3", "G(V1,V2)", "JG(V1,V2)", "N"],
            FrameCase::FlagD1 | FrameCase::FlagD1D2 => ["JN", "U", "JU", "V", "JV", "N"],
            FrameCase::FlagD1D2D3 => ["JV1", "JV2", "JV3", "U1", "U2", "N"],
        }
    }
}

impl fmt::Display for FrameCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for FrameCase {
    type Err = String;
    fn from_str(s: &str) -> Result<FrameCase, String> {
        FrameCase::ALL
            .iter()
            .copied()
            .find(|c| c.id() == s)
            .ok_or_else(|| format!("unknown frame case {s:?}"))
    }
}

/// A lemma's frame with all structure tensors in frame coordinates.
#[derive(Clone, Debug)]
pub struct HypersurfaceFrame {
    pub case: FrameCase,
    pub field: Arc<Field>,
    pub labels: [&'static str; DIM],
    pub geom: Geometry,
    /// Symbols whose nonvanishing the frame relies on.
    pub assumptions: Vec<Sym>,
    /// How the frame data was obtained.
    pub derivation: Vec<String>,
}

impl HypersurfaceFrame {
    pub fn norms(&self) -> &[Scalar] {
        &self.geom.metric.norms
    }

    pub fn e(&self, i: usize) -> Vector {
        Vector::basis(&self.field, i)
    }

    pub fn index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| *l == label)
    }

    pub fn vector(&self, label: &str) -> Option<Vector> {
        self.index(label).map(|i| self.e(i))
    }

    pub fn j(&self) -> &Matrix {
        &self.geom.j
    }

    pub fn aux(&self, name: &str) -> Option<&Matrix> {
        self.geom.aux.named().into_iter().find(|(n, _)| *n == name).map(|(_, m)| m)
    }

    pub fn dump(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "frame {} (table {}, {})", self.case, self.case.table(), self.case.space());
        let _ = writeln!(s, "basis {}", self.labels.join(" "));
        let syms: Vec<String> = self
            .field
            .symbols()
            .map(|(s, info)| {
                let nv = if self.assumptions.contains(&s) { " nonvanishing" } else { "" };
                format!("{}{nv}", info.name)
            })
            .collect();
        let _ = writeln!(s, "symbols {}", if syms.is_empty() { "-".into() } else { syms.join(", ") });
        for (l, n) in self.labels.iter().zip(self.norms()) {
            let _ = writeln!(s, "  |{l}|^2 = {n}");
        }
        let mut mats = vec![("J", &self.geom.j)];
        mats.extend(self.geom.aux.named());
        for (name, m) in mats {
            let _ = writeln!(s, "{name}");
            for j in 0..DIM {
                let _ = writeln!(s, "  {name} {} = {}", self.labels[j], self.fmt_vec(&m.cols[j]));
            }
        }
        for d in &self.derivation {
            let _ = writeln!(s, "# {d}");
        }
        s
    }

    pub fn fmt_vec(&self, v: &Vector) -> String {
        let parts: Vec<String> = v
            .0
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| match c.to_string().as_str() {
                "1" => self.labels[i].to_string(),
                "-1" => format!("-{}", self.labels[i]),
                t if c.numerator().len() > 1 => format!("({t})*{}", self.labels[i]),
                t => format!("{t}*{}", self.labels[i]),
            })
            .collect();
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ").replace("+ -", "- ")
        }
    }
}

/// Orthogonal base in which `J` and the auxiliary tensors are simple.
struct Base {
    field: Arc<Field>,
    metric: Metric,
    j: Matrix,
    aux: Aux,
}

impl Base {
    fn coords(&self, frame: &[Vector], norms: &[Scalar], v: &Vector) -> Vector {
        let c = Vector(
            frame
                .iter()
                .zip(norms)
                .map(|(e, n)| self.metric.g(v, e).checked_div(n).expect("frame norms are units"))
                .collect(),
        );
        let back = combine(
            &self.field,
            &c.0.iter().cloned().zip(frame.iter()).collect::<Vec<_>>(),
        );
        assert_eq!(back, *v, "vector outside the span of the frame");
        c
    }

    /// Expresses the base tensors in the frame `frame` (orthogonal basis
    /// given in base coordinates).
    fn project(&self, space: Space, frame: &[Vector]) -> Geometry {
        let norms: Vec<Scalar> = frame.iter().map(|e| self.metric.g(e, e)).collect();
        for (i, a) in frame.iter().enumerate() {
            assert!(norms[i].is_unit(), "frame vector {i} has non-unit norm {}", norms[i]);
            for b in &frame[i + 1..] {
                assert!(self.metric.g(a, b).is_zero(), "frame is not orthogonal");
            }
        }
        let proj = |m: &Matrix| Matrix {
            cols: frame.iter().map(|e| self.coords(frame, &norms, &m.apply(e))).collect(),
        };
        let aux = match &self.aux {
            Aux::None => Aux::None,
            Aux::P(p) => Aux::P(proj(p)),
            Aux::Jo(j) => Aux::Jo(proj(j)),
            Aux::Flag([a, b, c]) => Aux::Flag([proj(a), proj(b), proj(c)]),
        };
        let j = proj(&self.j);
        Geometry {
            space,
            metric: Metric { norms },
            j,
            aux,
        }
    }

    /// `G(G(X,Y),Z) = g(X,Z)Y - g(Y,Z)X - g(JX,Z)JY + g(JY,Z)JX`.
    fn gg(&self, x: &Vector, y: &Vector, z: &Vector) -> Vector {
        let g = |a: &Vector, b: &Vector| self.metric.g(a, b);
        let (jx, jy) = (self.j.apply(x), self.j.apply(y));
        y.scale(&g(x, z))
            .sub(&x.scale(&g(y, z)))
            .sub(&jy.scale(&g(&jx, z)))
            .add(&jx.scale(&g(&jy, z)))
    }
}

/// `J` on `{e0, Je0, e2, Je2, e4, Je4}`.
fn pair_j(f: &Arc<Field>) -> Matrix {
    Matrix::signed_permutation(f, [(1, 1), (-1, 0), (1, 3), (-1, 2), (1, 5), (-1, 4)])
}

/// `J` on `{JN, A, JA, B, JB, N}`.
fn normal_first_j(f: &Arc<Field>) -> Matrix {
    Matrix::signed_permutation(f, [(-1, 5), (1, 2), (-1, 1), (1, 4), (-1, 3), (1, 0)])
}

/// `J` restricted to the listed indices, `-J` on the others.
pub fn restricted(j: &Matrix, plus: &[usize]) -> Matrix {
    let mut m = j.neg();
    for &k in plus {
        m.cols[k] = j.cols[k].clone();
    }
    m
}

pub fn build_frame(case: FrameCase) -> HypersurfaceFrame {
    match case {
        FrameCase::S3S3Independent => s3s3_independent(),
        FrameCase::S3S3Dependent => s3s3_dependent(),
        FrameCase::CP3D1 | FrameCase::CP3D2 => cp3_pure(case),
        FrameCase::CP3Mixed => cp3_mixed(),
        FrameCase::FlagD1 => flag_d1(),
        FrameCase::FlagD1D2 => flag_d1d2(),
        FrameCase::FlagD1D2D3 => flag_d1d2d3(),
    }
}

fn frame(
    case: FrameCase,
    field: Arc<Field>,
    geom: Geometry,
    assumptions: Vec<Sym>,
    derivation: Vec<String>,
) -> HypersurfaceFrame {
    HypersurfaceFrame {
        case,
        field,
        labels: case.labels(),
        geom,
        assumptions,
        derivation,
    }
}

/// `G` on `span{JN, V, JV, N}` for the frame `{JN, V, JV, G(V,N), JG(V,N), N}`.
fn g_partial(f: &Arc<Field>, x: &Vector, y: &Vector) -> Vector {
    // (i, j, sign, k): G(E_i, E_j) = sign * E_k
    const TABLE: [(usize, usize, i64, usize); 4] = [(1, 5, 1, 3), (2, 5, -1, 4), (1, 0, -1, 4), (2, 0, -1, 3)];
    let span = [0usize, 1, 2, 5];
    for (i, c) in x.0.iter().chain(y.0.iter()).enumerate() {
        assert!(c.is_zero() || span.contains(&(i % DIM)), "outside the known span of G");
    }
    let mut out = Vector::zero(f);
    for &(i, j, s, k) in &TABLE {
        let coeff = &(&x.0[i] * &y.0[j]) - &(&x.0[j] * &y.0[i]);
        if !coeff.is_zero() {
            out = out.add(&Vector::basis(f, k).scale(&coeff.scale(&Rational::from_integer(s.into()))));
        }
    }
    out
}

fn s3s3_independent() -> HypersurfaceFrame {
    let mut b = FieldBuilder::new();
    let (t1, t2, rho) = b.rho_atom("t1", "t2", "rho");
    let f = b.build();
    let (t1, t2, rho_s) = (Scalar::sym(&f, t1), Scalar::sym(&f, t2), Scalar::sym(&f, rho));
    let one = Scalar::one(&f);
    let j = normal_first_j(&f);
    let e = |i| Vector::basis(&f, i);
    // PN = V + t1 N + t2 JN; P anticommutes with J, P^2 = Id,
    // PG(X,Y) = -G(PX,PY)
    let pn = combine(&f, &[(one.clone(), &e(1)), (t1.clone(), &e(5)), (t2.clone(), &e(0))]);
    let pjn = j.apply(&pn).neg();
    let pv = combine(&f, &[(one.clone(), &e(5)), (-&t1, &pn), (-&t2, &pjn)]);
    let pjv = j.apply(&pv).neg();
    let pg = g_partial(&f, &pv, &pn).neg();
    let pjg = j.apply(&pg).neg();
    let p = Matrix::from_images(vec![pjn, pv, pjv, pg, pjg, pn]);
    let metric = Metric {
        norms: vec![one.clone(), rho_s.clone(), rho_s.clone(), rho_s.clone(), rho_s, one],
    };
    let geom = Geometry {
        space: Space::S3xS3,
        metric,
        j,
        aux: Aux::P(p),
    };
    frame(
        FrameCase::S3S3Independent,
        f,
        geom,
        vec![rho],
        vec![
            "V = PN - t1 N - t2 JN, t1 = g(PN,N), t2 = g(PN,JN), rho = 1 - t1^2 - t2^2".into(),
            "P from PN, P^2 = Id, PJ = -JP, PG(V,N) = -G(PV,PN)".into(),
        ],
    )
}

fn s3s3_dependent() -> HypersurfaceFrame {
    s3s3_dependent_frame(1)
}

/// Dependent-case frame with `P V1 = V1` and `P V2 = v2_eigen * V2`.
///
/// The golden rows for this case are reproduced with `v2_eigen = 1`. The
/// assignment `-1` is the same frame with `V2` and `JV2` exchanged.
pub fn s3s3_dependent_frame(v2_eigen: i64) -> HypersurfaceFrame {
    assert!(v2_eigen == 1 || v2_eigen == -1);
    let mut b = FieldBuilder::new();
    let (c, s) = b.angle("t", false, false);
    let f = b.build();
    let (c, s) = (Scalar::sym(&f, c), Scalar::sym(&f, s));
    let e = |i| Vector::basis(&f, i);
    let j = normal_first_j_dependent(&f);
    // PN = cos t N + sin t JN, P(JN) = sin t N - cos t JN
    let pn = combine(&f, &[(c.clone(), &e(5)), (s.clone(), &e(0))]);
    let pjn = combine(&f, &[(s, &e(5)), (-&c, &e(0))]);
    let k = Scalar::int(&f, v2_eigen);
    let p = Matrix::from_images(vec![pjn, e(1), e(2).scale(&k), e(3).neg(), e(4).scale(&-&k), pn]);
    let geom = Geometry {
        space: Space::S3xS3,
        metric: Metric::identity(&f),
        j,
        aux: Aux::P(p),
    };
    let note = if v2_eigen == 1 {
        "V1, V2 eigenvectors of P for +1; JV1, JV2 for -1"
    } else {
        "V1, V2 eigenvectors of P for +1, -1; JV1, JV2 for -1, +1"
    };
    frame(FrameCase::S3S3Dependent, f, geom, vec![], vec![note.into()])
}

/// `J` on `{JN, V1, V2, JV1, JV2, N}`.
fn normal_first_j_dependent(f: &Arc<Field>) -> Matrix {
    Matrix::signed_permutation(f, [(-1, 5), (1, 3), (1, 4), (-1, 1), (-1, 2), (1, 0)])
}

fn cp3_pure(case: FrameCase) -> HypersurfaceFrame {
    let f = Field::empty();
    let j = normal_first_j(&f);
    let (plus, note) = if case == FrameCase::CP3D1 {
        ([0, 5], "D1 = span{N, JN}")
    } else {
        ([1, 2], "D1 = span{V, JV}")
    };
    let jo = restricted(&j, &plus);
    let geom = Geometry {
        space: Space::CP3,
        metric: Metric::identity(&f),
        j,
        aux: Aux::Jo(jo),
    };
    frame(case, f, geom, vec![], vec![format!("{note}; Jo = J on D1, -J on D2")])
}

fn cp3_mixed() -> HypersurfaceFrame {
    let mut b = FieldBuilder::new();
    let (c, s) = b.angle("t", true, true);
    let f = b.build();
    let (cs, ss) = (Scalar::sym(&f, c), Scalar::sym(&f, s));
    let (c2, s2) = (&cs * &cs, &ss * &ss);
    let e = |i| Vector::basis(&f, i);
    // base {V1, JV1, V2, JV2, G(V1,V2), JG(V1,V2)}
    let j = pair_j(&f);
    let base = Base {
        field: f.clone(),
        metric: Metric {
            norms: vec![c2.clone(), c2.clone(), s2.clone(), s2.clone(), &c2 * &s2, &c2 * &s2],
        },
        j: j.clone(),
        aux: Aux::Jo(restricted(&j, &[0, 1])),
    };
    let n = e(0).add(&e(2));
    let v3 = base.gg(&e(0), &e(2), &n);
    let frame_vecs = vec![e(1), e(3), v3, e(4), e(5), n];
    let geom = base.project(Space::CP3, &frame_vecs);
    frame(
        FrameCase::CP3Mixed,
        f,
        geom,
        vec![c, s],
        vec![
            "|V1|^2 = cos(t)^2, |V2|^2 = sin(t)^2, N = V1 + V2".into(),
            "V3 = G(G(V1,V2),N) = -sin(t)^2 V1 + cos(t)^2 V2".into(),
            "Jo = J on span{V1, JV1}, -J on span{V2, JV2, G(V1,V2), JG(V1,V2)}".into(),
        ],
    )
}

fn flag_base(f: &Arc<Field>) -> Base {
    let j = pair_j(f);
    Base {
        field: f.clone(),
        metric: Metric::identity(f),
        aux: Aux::Flag([restricted(&j, &[0, 1]), restricted(&j, &[2, 3]), restricted(&j, &[4, 5])]),
        j,
    }
}

fn flag_d1() -> HypersurfaceFrame {
    let f = Field::empty();
    let j = normal_first_j(&f);
    let aux = Aux::Flag([restricted(&j, &[0, 5]), restricted(&j, &[1, 2]), restricted(&j, &[3, 4])]);
    let geom = Geometry {
        space: Space::FlagC3,
        metric: Metric::identity(&f),
        j,
        aux,
    };
    frame(
        FrameCase::FlagD1,
        f,
        geom,
        vec![],
        vec!["N in D1, U in D2, V in D3 unit; J_i = J on D_i, -J elsewhere".into()],
    )
}

fn flag_d1d2() -> HypersurfaceFrame {
    let mut b = FieldBuilder::new();
    let (c, s) = b.angle("phi", true, true);
    let f = b.build();
    let (cs, ss) = (Scalar::sym(&f, c), Scalar::sym(&f, s));
    let e = |i| Vector::basis(&f, i);
    // base {n1, Jn1, n2, Jn2, v, Jv}
    let base = flag_base(&f);
    let n = combine(&f, &[(cs.clone(), &e(0)), (ss.clone(), &e(2))]);
    let Aux::Flag([j1, _, _]) = &base.aux else { unreachable!() };
    let jj1n = base.j.apply(&j1.apply(&n));
    let cos_theta = base.metric.g(&jj1n, &n);
    let sin_theta = (&cs * &ss).scale(&Rational::from_integer(2.into()));
    assert!((&(&cos_theta * &cos_theta) + &(&sin_theta * &sin_theta)).is_one());
    let u = jj1n
        .sub(&n.scale(&cos_theta))
        .scale(&sin_theta.recip().expect("sin(phi) cos(phi) is a unit"));
    let ju = base.j.apply(&u);
    let jn = base.j.apply(&n);
    let geom = base.project(Space::FlagC3, &[jn, u, ju, e(4), e(5), n]);
    frame(
        FrameCase::FlagD1D2,
        f,
        geom,
        vec![c, s],
        vec![
            "N = cos(phi) n1 + sin(phi) n2 with n_i unit in D_i, V unit in D3".into(),
            "cos(theta) = g(JJ1N,N) = sin(phi)^2 - cos(phi)^2, sin(theta) = 2 sin(phi) cos(phi)".into(),
            "U = (JJ1N - cos(theta) N)/sin(theta) = -sin(phi) n1 + cos(phi) n2".into(),
        ],
    )
}

fn flag_d1d2d3() -> HypersurfaceFrame {
    let mut b = FieldBuilder::new();
    let (c1, s1) = b.angle("t1", true, true);
    let (c2, s2) = b.angle("t2", true, true);
    let f = b.build();
    let [c1s, s1s, c2s, s2s] = [c1, s1, c2, s2].map(|x| Scalar::sym(&f, x));
    let e = |i| Vector::basis(&f, i);
    // base {V1, JV1, V2, JV2, V3, JV3}
    let base = flag_base(&f);
    let w = combine(&f, &[(s2s.clone(), &e(2)), (c2s.clone(), &e(4))]);
    let n = combine(&f, &[(c1s.clone(), &e(0)), (s1s.clone(), &w)]);
    let u1 = combine(&f, &[(c2s, &e(2)), (-&s2s, &e(4))]);
    let u2 = combine(&f, &[(s1s, &e(0)), (-&c1s, &w)]);
    let geom = base.project(Space::FlagC3, &[e(1), e(3), e(5), u1, u2, n]);
    frame(
        FrameCase::FlagD1D2D3,
        f,
        geom,
        vec![c1, s1, c2, s2],
        vec![
            "N = cos(t1) V1 + sin(t1)(sin(t2) V2 + cos(t2) V3) with V_i unit in D_i".into(),
            "U1 = cos(t2) V2 - sin(t2) V3, U2 = sin(t1) V1 - cos(t1)(sin(t2) V2 + cos(t2) V3)".into(),
        ],
    )
}

#[derive(Clone, Debug, Serialize)]
pub struct FrameReport {
    pub case: FrameCase,
    pub checks: Vec<IdentityCheck>,
}

impl FrameReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(IdentityCheck::passed)
    }
}

fn check(id: &str, residuals: Vec<String>, tuples: usize) -> IdentityCheck {
    IdentityCheck {
        id: id.to_string(),
        tuples,
        failures: residuals.len(),
        residual: residuals.into_iter().next().unwrap_or_else(|| "0".into()),
    }
}

fn matrix_check(id: &str, m: &Matrix) -> IdentityCheck {
    let bad: Vec<String> = m
        .cols
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(j, c)| format!("column {j}: {:?}", c.0.iter().map(|x| x.to_string()).collect::<Vec<_>>()))
        .collect();
    check(id, bad, DIM)
}

fn bool_check(id: &str, ok: bool) -> IdentityCheck {
    check(id, if ok { vec![] } else { vec!["fails".into()] }, 1)
}

fn trace(m: &Matrix) -> Scalar {
    (0..DIM).fold(Scalar::zero(m.field()), |acc, i| &acc + m.entry(i, i))
}

/// Exact checks of the frame data.
pub fn validate_frame(fr: &HypersurfaceFrame) -> FrameReport {
    let f = &fr.field;
    let id = Matrix::identity(f);
    let j = &fr.geom.j;
    let metric = &fr.geom.metric;
    let mut checks = vec![
        bool_check("norms are units", fr.norms().iter().all(Scalar::is_unit)),
        matrix_check("J^2 = -Id", &j.compose(j).add(&id)),
        bool_check("g(JX,JY) = g(X,Y)", metric.is_isometry(j)),
    ];
    match &fr.geom.aux {
        Aux::None => {}
        Aux::P(p) => {
            checks.push(matrix_check("P^2 = Id", &p.compose(p).add(&id.neg())));
            checks.push(bool_check("g(PX,PY) = g(X,Y)", metric.is_isometry(p)));
            checks.push(matrix_check("PJ = -JP", &p.compose(j).add(&j.compose(p))));
        }
        Aux::Jo(jo) => {
            checks.extend(complex_checks(fr, "Jo", jo));
            checks.push(bool_check("trace(J Jo) = 2", trace(&j.compose(jo)) == Scalar::int(f, 2)));
        }
        Aux::Flag(js) => {
            for (k, a) in js.iter().enumerate() {
                checks.extend(complex_checks(fr, &format!("J{}", k + 1), a));
                checks.push(bool_check(
                    &format!("trace(J J{}) = 2", k + 1),
                    trace(&j.compose(a)) == Scalar::int(f, 2),
                ));
            }
            let sum = js.iter().fold(Matrix::zero(f), |acc, a| acc.add(&j.compose(a)));
            checks.push(matrix_check("JJ1 + JJ2 + JJ3 = Id", &sum.add(&id.neg())));
        }
    }
    FrameReport { case: fr.case, checks }
}

/// `A` is a g-orthogonal complex structure commuting with `J` such that
/// `JA` is an involution (so `A = +-J` on complementary distributions).
fn complex_checks(fr: &HypersurfaceFrame, name: &str, a: &Matrix) -> Vec<IdentityCheck> {
    let id = Matrix::identity(&fr.field);
    let j = &fr.geom.j;
    let ja = j.compose(a);
    vec![
        matrix_check(&format!("{name}^2 = -Id"), &a.compose(a).add(&id)),
        bool_check(&format!("g({name}X,{name}Y) = g(X,Y)"), fr.geom.metric.is_isometry(a)),
        matrix_check(&format!("{name}J = J{name}"), &a.compose(j).add(&j.compose(a).neg())),
        matrix_check(&format!("(J{name})^2 = Id"), &ja.compose(&ja).add(&id.neg())),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvature::{cyclic_sum, cyclic_sum_identity, ShapeOp};
    use crate::parse::parse_scalar;

    #[test]
    fn every_frame_validates() {
        for case in FrameCase::ALL {
            let r = validate_frame(&build_frame(case));
            for c in &r.checks {
                assert!(c.passed(), "{case}: {} -> {}", c.id, c.residual);
            }
        }
    }

    #[test]
    fn product_independent_gram_and_matrix() {
        let fr = build_frame(FrameCase::S3S3Independent);
        let f = &fr.field;
        let rho = parse_scalar(f, "1 - t1^2 - t2^2").unwrap();
        let one = Scalar::one(f);
        assert_eq!(fr.norms(), &[one.clone(), rho.clone(), rho.clone(), rho.clone(), rho, one]);
        let rows = [
            ["-t1", "0", "t1^2 + t2^2 - 1", "0", "0", "t2"],
            ["0", "-t1", "t2", "0", "0", "1"],
            ["-1", "t2", "t1", "0", "0", "0"],
            ["0", "0", "0", "1", "0", "0"],
            ["0", "0", "0", "0", "-1", "0"],
            ["t2", "1 - t1^2 - t2^2", "0", "0", "0", "t1"],
        ];
        let p = fr.aux("P").unwrap();
        for (i, row) in rows.iter().enumerate() {
            for (j, text) in row.iter().enumerate() {
                assert_eq!(*p.entry(i, j), parse_scalar(f, text).unwrap(), "entry ({i},{j})");
            }
        }
    }

    #[test]
    fn product_structure_anticommutes_with_j() {
        let fr = build_frame(FrameCase::S3S3Independent);
        let p = fr.aux("P").unwrap();
        assert!(p.compose(fr.j()).add(&fr.j().compose(p)).is_zero());
    }

    #[test]
    fn cp3_mixed_norms_and_jo() {
        let fr = build_frame(FrameCase::CP3Mixed);
        let f = &fr.field;
        let n = |s: &str| parse_scalar(f, s).unwrap();
        assert_eq!(fr.norms()[0], n("cos(t)^2"));
        assert_eq!(fr.norms()[1], n("sin(t)^2"));
        assert_eq!(fr.norms()[2], n("cos(t)^2*sin(t)^2"));
        assert_eq!(fr.norms()[3], n("cos(t)^2*sin(t)^2"));
        let jo_v3 = fr.aux("Jo").unwrap().apply(&fr.e(2));
        let expected = Vector(vec![n("-sin(t)^2"), n("-cos(t)^2"), n("0"), n("0"), n("0"), n("0")]);
        assert_eq!(jo_v3, expected);
    }

    #[test]
    fn flag_frames_are_orthonormal() {
        for case in [FrameCase::FlagD1, FrameCase::FlagD1D2, FrameCase::FlagD1D2D3] {
            assert!(build_frame(case).norms().iter().all(Scalar::is_one), "{case}");
        }
    }

    #[test]
    fn flag_two_distributions_u() {
        let fr = build_frame(FrameCase::FlagD1D2);
        // U lies in D1 + D2, so J3 acts on it as -J
        let j3 = fr.aux("J3").unwrap();
        let u = fr.vector("U").unwrap();
        assert_eq!(j3.apply(&u), fr.j().apply(&u).neg());
    }

    #[test]
    fn case_ids_round_trip() {
        for c in FrameCase::ALL {
            assert_eq!(c.id().parse::<FrameCase>().unwrap(), c);
            assert_eq!(FrameCase::for_table(c.table()), Some(c));
        }
        assert_eq!(FrameCase::for_table(9), None);
    }

    fn curvature_table(fr: &HypersurfaceFrame) -> Vec<Vector> {
        let mut out = Vec::with_capacity(DIM * DIM * DIM);
        for a in 0..DIM {
            for b in 0..DIM {
                for c in 0..DIM {
                    out.push(fr.geom.riemann(&fr.e(a), &fr.e(b), &fr.e(c)).unwrap());
                }
            }
        }
        out
    }

    #[test]
    fn curvature_symmetries_on_every_frame() {
        for case in FrameCase::ALL {
            let fr = build_frame(case);
            let r = curvature_table(&fr);
            let idx = |a: usize, b: usize, c: usize| a * DIM * DIM + b * DIM + c;
            let r4 = |a, b, c, d: usize| fr.geom.metric.g(&r[idx(a, b, c)], &fr.e(d));
            for a in 0..DIM {
                for b in 0..DIM {
                    for c in 0..DIM {
                        assert_eq!(r[idx(a, b, c)], r[idx(b, a, c)].neg(), "{case} antisymmetry");
                        let bianchi = r[idx(a, b, c)].add(&r[idx(b, c, a)]).add(&r[idx(c, a, b)]);
                        assert!(bianchi.is_zero(), "{case} Bianchi at ({a},{b},{c})");
                        for d in 0..DIM {
                            assert_eq!(r4(a, b, c, d), r4(c, d, a, b), "{case} pair symmetry");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn identity_shape_cyclic_sum_vanishes() {
        for case in FrameCase::ALL {
            let fr = build_frame(case);
            for x in 0..5 {
                for y in 0..5 {
                    for z in 0..5 {
                        for w in 0..5 {
                            let (x, y, z, w) = (fr.e(x), fr.e(y), fr.e(z), fr.e(w));
                            assert!(cyclic_sum_identity(&fr.geom, &x, &y, &z, &w).unwrap().is_zero());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn cyclic_sum_is_tensorial() {
        let fr = build_frame(FrameCase::CP3Mixed);
        let s = ShapeOp::new(&fr.geom.metric);
        let k = parse_scalar(&fr.field, "cos(t) + 3").unwrap();
        let (x, y, z, w) = (fr.e(0), fr.e(1), fr.e(2), fr.e(2));
        let base = cyclic_sum(&fr.geom, &s, &x, &y, &z, &w).unwrap();
        assert!(!base.is_zero());
        for slot in 0..4 {
            let mut args = [x.clone(), y.clone(), z.clone(), w.clone()];
            args[slot] = args[slot].scale(&k);
            let scaled = cyclic_sum(&fr.geom, &s, &args[0], &args[1], &args[2], &args[3]).unwrap();
            assert_eq!(scaled, base.scale(&k), "slot {slot}");
        }
    }

    #[test]
    fn shape_operator_is_symmetric() {
        let fr = build_frame(FrameCase::S3S3Independent);
        let s = ShapeOp::new(&fr.geom.metric);
        for i in 0..5 {
            for j in 0..5 {
                let (a, b) = (fr.e(i), fr.e(j));
                assert_eq!(s.pairing(&a, &b), s.pairing(&b, &a));
                // g(SE_i, E_j) = h(i,j) through the explicit action
                let se = s.apply(&a).pair(&fr.geom.metric, &b);
                assert_eq!(se, s.pairing(&b, &a));
            }
        }
    }

    #[test]
    fn dump_mentions_derivation() {
        let d = build_frame(FrameCase::FlagD1D2).dump();
        assert!(d.contains("U = (JJ1N - cos(theta) N)/sin(theta)"));
        assert!(d.contains("J1"));
    }
}
