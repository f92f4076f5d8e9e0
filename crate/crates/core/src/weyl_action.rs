//! Weyl group elements as integer isometries of the root lattice.
//!
//! A word's matrix is the product of its generator matrices in reading
//! order, so the rightmost symbol acts first on a vector.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, IntMatrix};
use crate::root_lattice::{BasisLabel, LatticeVector, RootSystemData};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "op")]
pub enum GeneratorSymbol {
    /// The simple reflection `w_{α_v}`.
    #[serde(rename = "w")]
    Reflection { vertex: BasisLabel },
    /// The translation `r_v`, `v` in `Γ_a`.
    #[serde(rename = "r")]
    Translation { vertex: BasisLabel },
    #[serde(rename = "rInv")]
    TranslationInverse { vertex: BasisLabel },
}

impl GeneratorSymbol {
    pub fn w(vertex: BasisLabel) -> Self {
        GeneratorSymbol::Reflection { vertex }
    }
    pub fn r(vertex: BasisLabel) -> Self {
        GeneratorSymbol::Translation { vertex }
    }
    pub fn r_inv(vertex: BasisLabel) -> Self {
        GeneratorSymbol::TranslationInverse { vertex }
    }

    pub fn vertex(&self) -> BasisLabel {
        match *self {
            GeneratorSymbol::Reflection { vertex }
            | GeneratorSymbol::Translation { vertex }
            | GeneratorSymbol::TranslationInverse { vertex } => vertex,
        }
    }

    pub fn inverse(&self) -> Self {
        match *self {
            GeneratorSymbol::Reflection { vertex } => GeneratorSymbol::w(vertex),
            GeneratorSymbol::Translation { vertex } => GeneratorSymbol::r_inv(vertex),
            GeneratorSymbol::TranslationInverse { vertex } => GeneratorSymbol::r(vertex),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WeylWord(pub Vec<GeneratorSymbol>);

impl WeylWord {
    pub fn identity() -> Self {
        WeylWord(Vec::new())
    }

    pub fn symbols(&self) -> &[GeneratorSymbol] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> Self {
        WeylWord(self.0.iter().rev().map(GeneratorSymbol::inverse).collect())
    }

    /// `self · other` as group elements.
    pub fn concat(&self, other: &WeylWord) -> Self {
        WeylWord(self.0.iter().chain(&other.0).copied().collect())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LatticeIsometry {
    matrix: IntMatrix,
}

impl LatticeIsometry {
    /// Checks `MᵀGM = G`.
    pub fn new(sys: &RootSystemData, matrix: IntMatrix) -> Result<Self> {
        check_isometry(sys, &matrix)?;
        Ok(LatticeIsometry { matrix })
    }

    pub(crate) fn from_matrix_unchecked(matrix: IntMatrix) -> Self {
        LatticeIsometry { matrix }
    }

    pub fn identity(sys: &RootSystemData) -> Self {
        LatticeIsometry {
            matrix: IntMatrix::identity(sys.rank()),
        }
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn apply(&self, x: &LatticeVector) -> LatticeVector {
        LatticeVector(self.matrix.mul_vec(&x.0))
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &LatticeIsometry) -> Self {
        LatticeIsometry {
            matrix: self.matrix.mul_mat(&other.matrix),
        }
    }

    pub fn inverse(&self) -> Self {
        let inv = linalg::inverse(&linalg::to_rational(&self.matrix))
            .and_then(|m| linalg::to_integer(&m))
            .expect("lattice isometries are unimodular");
        LatticeIsometry { matrix: inv }
    }

    pub fn is_identity(&self) -> bool {
        self.matrix.is_identity()
    }
}

pub fn check_isometry(sys: &RootSystemData, m: &IntMatrix) -> Result<()> {
    if m.rows() != sys.rank() || !m.is_square() || m.congruence(sys.gram()) != *sys.gram() {
        return Err(Error::NotIsometry);
    }
    Ok(())
}

fn real_root_check(sys: &RootSystemData, alpha: &LatticeVector) -> Result<()> {
    sys.check_dim(alpha)?;
    let norm = sys.norm(alpha);
    if norm != 2 {
        return Err(Error::NotRealRoot { norm });
    }
    Ok(())
}

/// `x - I(x, α)·α`.
pub fn reflect(sys: &RootSystemData, alpha: &LatticeVector, x: &LatticeVector) -> Result<LatticeVector> {
    real_root_check(sys, alpha)?;
    sys.check_dim(x)?;
    Ok(x - &(sys.pair(x, alpha) * alpha))
}

/// Matrix of `w_α` for a real root `α`.
pub fn reflection_matrix(sys: &RootSystemData, alpha: &LatticeVector) -> Result<IntMatrix> {
    real_root_check(sys, alpha)?;
    Ok(rank_one_update(sys, alpha, &sys.gram_times(alpha), -1))
}

/// `Id + s · x (y)ᵀ`.
fn rank_one_update(sys: &RootSystemData, x: &LatticeVector, y: &[i64], s: i64) -> IntMatrix {
    let n = sys.rank();
    IntMatrix::from_fn(n, n, |i, j| i64::from(i == j) + s * x[i] * y[j])
}

fn vertex_index(sys: &RootSystemData, v: BasisLabel) -> Result<usize> {
    sys.index_of(v).ok_or(Error::InvalidVertex(v))
}

fn affine_vertex_index(sys: &RootSystemData, v: BasisLabel) -> Result<usize> {
    match vertex_index(sys, v)? {
        0 => Err(Error::InvalidVertex(v)),
        i => Ok(i),
    }
}

pub fn simple_reflection(sys: &RootSystemData, v: BasisLabel) -> Result<IntMatrix> {
    let i = vertex_index(sys, v)?;
    reflection_matrix(sys, &sys.unit(i))
}

/// `r_v` from the closed form `β ↦ β + I(β, α_v)·a`.
pub fn r_element(sys: &RootSystemData, v: BasisLabel) -> Result<LatticeIsometry> {
    let i = affine_vertex_index(sys, v)?;
    Ok(LatticeIsometry::from_matrix_unchecked(rank_one_update(
        sys,
        sys.a(),
        sys.gram().row(i),
        1,
    )))
}

fn r_inverse_matrix(sys: &RootSystemData, v: BasisLabel) -> Result<IntMatrix> {
    let i = affine_vertex_index(sys, v)?;
    Ok(rank_one_update(sys, sys.a(), sys.gram().row(i), -1))
}

/// `r_v` and its inverse from the recursive composite:
/// `r_{v_0} = w_0 w_{-1}` and `r_{(i,j)} = w_{(i,j)} r_prev w_{(i,j)} r_prev⁻¹`,
/// where `prev` is the previous vertex on the arm (or `v_0` at depth 1).
pub fn r_element_recursive(sys: &RootSystemData, v: BasisLabel) -> Result<(IntMatrix, IntMatrix)> {
    affine_vertex_index(sys, v)?;
    let w0 = simple_reflection(sys, BasisLabel::V0)?;
    let wm1 = simple_reflection(sys, BasisLabel::VMinus1)?;
    let mut m = w0.mul_mat(&wm1);
    let mut m_inv = wm1.mul_mat(&w0);
    if let BasisLabel::Arm { arm, depth } = v {
        for j in 1..=depth {
            let w = simple_reflection(sys, BasisLabel::arm(arm, j))?;
            let next = w.mul_mat(&m).mul_mat(&w).mul_mat(&m_inv);
            let next_inv = m.mul_mat(&w).mul_mat(&m_inv).mul_mat(&w);
            m = next;
            m_inv = next_inv;
        }
    }
    Ok((m, m_inv))
}

/// `φ(u)(β) = β + I(β, u)·a` for `u` supported on `Γ_a`.
pub fn phi_hom(sys: &RootSystemData, u: &LatticeVector) -> Result<LatticeIsometry> {
    sys.check_dim(u)?;
    if u[0] != 0 {
        return Err(Error::UnsupportedVertex(u[0]));
    }
    Ok(LatticeIsometry::from_matrix_unchecked(rank_one_update(
        sys,
        sys.a(),
        &sys.gram_times(u),
        1,
    )))
}

pub fn generator_matrix(sys: &RootSystemData, s: &GeneratorSymbol) -> Result<IntMatrix> {
    match *s {
        GeneratorSymbol::Reflection { vertex } => simple_reflection(sys, vertex),
        GeneratorSymbol::Translation { vertex } => Ok(r_element(sys, vertex)?.matrix),
        GeneratorSymbol::TranslationInverse { vertex } => r_inverse_matrix(sys, vertex),
    }
}

pub fn word_matrix(sys: &RootSystemData, w: &WeylWord) -> Result<IntMatrix> {
    let mut m = IntMatrix::identity(sys.rank());
    for s in w.symbols() {
        m = m.mul_mat(&generator_matrix(sys, s)?);
    }
    Ok(m)
}

pub fn word_isometry(sys: &RootSystemData, w: &WeylWord) -> Result<LatticeIsometry> {
    Ok(LatticeIsometry::from_matrix_unchecked(word_matrix(sys, w)?))
}

pub fn apply_word(sys: &RootSystemData, w: &WeylWord, x: &LatticeVector) -> Result<LatticeVector> {
    sys.check_dim(x)?;
    let mut y = x.clone();
    for s in w.symbols().iter().rev() {
        y = LatticeVector(generator_matrix(sys, s)?.mul_vec(&y.0));
    }
    Ok(y)
}

/// True iff `M` acts trivially on `F / ℤa`.
pub fn is_translation(sys: &RootSystemData, m: &IntMatrix) -> Result<bool> {
    check_isometry(sys, m)?;
    let d = m.sub_mat(&IntMatrix::identity(sys.rank()));
    let a = sys.a();
    Ok((0..sys.rank()).all(|j| {
        let col = d.column(j);
        // columns must be integer multiples of a = α_0 - α_{-1}
        let k = col[1];
        col.iter().enumerate().all(|(i, &c)| c == k * a[i])
    }))
}

/// Image of a word in the finite-type section generated by `w_{α_v}`, `v ∈ Γ_a`:
/// translations are dropped and `w_{-1}` is replaced by `w_0`.
pub fn affine_section(w: &WeylWord) -> WeylWord {
    WeylWord(
        w.symbols()
            .iter()
            .filter_map(|s| match *s {
                GeneratorSymbol::Reflection {
                    vertex: BasisLabel::VMinus1,
                } => Some(GeneratorSymbol::w(BasisLabel::V0)),
                GeneratorSymbol::Reflection { .. } => Some(*s),
                _ => None,
            })
            .collect(),
    )
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationCheck {
    pub relation: String,
    pub u: BasisLabel,
    pub v: BasisLabel,
    pub pass: bool,
}

/// Checks the Artin-type relations for `g_v ↦ w_{α_v}`, `h_v ↦ r_v` over
/// every ordered pair of distinct `Γ_a` vertices.
pub fn artin_relation_report(sys: &RootSystemData) -> Vec<RelationCheck> {
    let labels = sys.affine_labels();
    let g: Vec<IntMatrix> = labels
        .iter()
        .map(|&v| simple_reflection(sys, v).expect("basis vertex"))
        .collect();
    let h: Vec<IntMatrix> = labels
        .iter()
        .map(|&v| r_element(sys, v).expect("affine vertex").matrix)
        .collect();
    let n = labels.len();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
        .collect();
    pairs
        .par_iter()
        .flat_map_iter(|&(iu, iv)| {
            let (gu, gv, hu, hv) = (&g[iu], &g[iv], &h[iu], &h[iv]);
            let pairing = *sys.gram().get(iu + 1, iv + 1);
            let mut out = Vec::new();
            let mut push = |name: &str, pass: bool| {
                out.push(RelationCheck {
                    relation: name.to_string(),
                    u: labels[iu],
                    v: labels[iv],
                    pass,
                })
            };
            match pairing {
                0 => push("g_commute", gv.mul_mat(gu) == gu.mul_mat(gv)),
                -1 => push(
                    "g_braid",
                    gv.mul_mat(gu).mul_mat(gv) == gu.mul_mat(gv).mul_mat(gu),
                ),
                _ => {}
            }
            push("h_commute", hv.mul_mat(hu) == hu.mul_mat(hv));
            match pairing {
                0 => push("gh_commute", gv.mul_mat(hu) == hu.mul_mat(gv)),
                -1 => push("gh_braid", gv.mul_mat(hu).mul_mat(gv) == hu.mul_mat(hv)),
                _ => {}
            }
            out
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::root_lattice::{build_system, WeightSignature};
    use proptest::prelude::*;

    fn e6() -> RootSystemData {
        build_system(&WeightSignature::new(&[3, 3, 3]).unwrap()).unwrap()
    }

    fn all_systems() -> Vec<RootSystemData> {
        WeightSignature::elliptic_signatures()
            .iter()
            .map(|s| build_system(s).unwrap())
            .collect()
    }

    #[test]
    fn reflection_examples() {
        let s = e6();
        let a0 = s.unit(1);
        let am1 = s.unit(0);
        let a11 = s.unit(2);
        assert_eq!(reflect(&s, &a0, &a0).unwrap(), -&a0);
        assert_eq!(reflect(&s, &a0, &am1).unwrap(), &am1 - &(2 * &a0));
        assert_eq!(reflect(&s, &a11, &a0).unwrap(), &a0 + &a11);
        assert_eq!(
            reflect(&s, &(2 * &a0), &a0),
            Err(Error::NotRealRoot { norm: 8 })
        );
    }

    #[test]
    fn translation_examples() {
        let s = e6();
        let r0 = r_element(&s, BasisLabel::V0).unwrap();
        let a11 = s.unit(2);
        assert_eq!(r0.apply(&a11), &a11 - s.a());
        assert_eq!(r0.apply(s.b()), *s.b());
        assert_eq!(r0.apply(&s.unit(1)), &s.unit(1) + &(2 * s.a()));
        assert_eq!(
            r_element(&s, BasisLabel::VMinus1),
            Err(Error::InvalidVertex(BasisLabel::VMinus1))
        );
    }

    #[test]
    fn closed_form_matches_composite_everywhere() {
        for s in all_systems() {
            for &v in s.affine_labels() {
                let (m, m_inv) = r_element_recursive(&s, v).unwrap();
                assert_eq!(m, *r_element(&s, v).unwrap().matrix(), "{v}");
                assert!(m.mul_mat(&m_inv).is_identity());
            }
        }
    }

    #[test]
    fn phi_examples() {
        let s = e6();
        assert!(phi_hom(&s, s.b()).unwrap().is_identity());
        assert!(phi_hom(&s, &LatticeVector::zero(8)).unwrap().is_identity());
        let p = phi_hom(&s, &s.unit(1)).unwrap();
        assert_eq!(p.apply(&s.unit(2)), &s.unit(2) - s.a());
        assert_eq!(phi_hom(&s, &s.unit(0)), Err(Error::UnsupportedVertex(1)));
    }

    #[test]
    fn word_examples() {
        let s = e6();
        let x = LatticeVector(vec![1, -2, 3, 0, 1, 1, -1, 2]);
        assert_eq!(apply_word(&s, &WeylWord::identity(), &x).unwrap(), x);
        let ww = WeylWord(vec![GeneratorSymbol::w(BasisLabel::V0); 2]);
        assert_eq!(apply_word(&s, &ww, &x).unwrap(), x);
        let w = WeylWord(vec![
            GeneratorSymbol::w(BasisLabel::V0),
            GeneratorSymbol::w(BasisLabel::VMinus1),
        ]);
        assert_eq!(apply_word(&s, &w, &s.unit(2)).unwrap(), &s.unit(2) - s.a());
        assert_eq!(
            word_matrix(&s, &w).unwrap(),
            *r_element(&s, BasisLabel::V0).unwrap().matrix()
        );
        let json = serde_json::to_string(&w).unwrap();
        assert_eq!(
            json,
            r#"[{"op":"w","vertex":"v0"},{"op":"w","vertex":"vMinus1"}]"#
        );
        assert_eq!(serde_json::from_str::<WeylWord>(&json).unwrap(), w);
    }

    #[test]
    fn translation_predicate() {
        let s = e6();
        let r0 = r_element(&s, BasisLabel::V0).unwrap();
        assert!(is_translation(&s, r0.matrix()).unwrap());
        assert!(!is_translation(&s, &simple_reflection(&s, BasisLabel::V0).unwrap()).unwrap());
        assert!(is_translation(&s, &IntMatrix::identity(8)).unwrap());
        let mut bad = IntMatrix::identity(8);
        bad.set(0, 0, 2);
        assert_eq!(is_translation(&s, &bad), Err(Error::NotIsometry));
    }

    #[test]
    fn relations_hold_in_all_systems() {
        for s in all_systems() {
            let report = artin_relation_report(&s);
            assert!(!report.is_empty());
            assert!(report.iter().all(|r| r.pass), "{:?}", s.signature());
        }
        let s = e6();
        let report = artin_relation_report(&s);
        let find = |rel: &str, u: BasisLabel, v: BasisLabel| {
            report
                .iter()
                .find(|r| r.relation == rel && r.u == u && r.v == v)
                .map(|r| r.pass)
        };
        assert_eq!(find("g_braid", BasisLabel::V0, BasisLabel::arm(1, 1)), Some(true));
        assert_eq!(
            find("g_commute", BasisLabel::arm(1, 1), BasisLabel::arm(2, 1)),
            Some(true)
        );
    }

    #[test]
    fn reflections_preserve_root_window() {
        let s = e6();
        let roots = s.enumerate_roots(1, 1).unwrap();
        for i in 0..s.rank() {
            let m = simple_reflection(&s, s.label(i)).unwrap();
            for r in &roots {
                let img = LatticeVector(m.mul_vec(&r.0));
                assert_eq!(s.norm(&img), 2);
            }
        }
    }

    fn symbol_from(s: &RootSystemData, i: usize, k: u8) -> GeneratorSymbol {
        let v = s.label(i % s.rank());
        match (k, v) {
            (_, BasisLabel::VMinus1) | (0, _) => GeneratorSymbol::w(v),
            (1, _) => GeneratorSymbol::r(v),
            _ => GeneratorSymbol::r_inv(v),
        }
    }

    proptest! {
        #[test]
        fn phi_is_homomorphism(u in prop::collection::vec(-5i64..=5, 7), w in prop::collection::vec(-5i64..=5, 7)) {
            let s = e6();
            let lift = |c: &[i64]| { let mut v = vec![0]; v.extend_from_slice(c); LatticeVector(v) };
            let (u, w) = (lift(&u), lift(&w));
            let lhs = phi_hom(&s, &(&u + &w)).unwrap();
            let rhs = phi_hom(&s, &u).unwrap().compose(&phi_hom(&s, &w).unwrap());
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn words_are_isometries_fixing_radical(raw in prop::collection::vec((0usize..8, 0u8..3), 0..=12)) {
            let s = e6();
            let syms: Vec<GeneratorSymbol> = raw.iter().map(|&(i, k)| symbol_from(&s, i, k)).collect();
            let w = WeylWord(syms);
            let m = word_matrix(&s, &w).unwrap();
            prop_assert!(check_isometry(&s, &m).is_ok());
            prop_assert_eq!(LatticeVector(m.mul_vec(&s.a().0)), s.a().clone());
            prop_assert_eq!(LatticeVector(m.mul_vec(&s.b().0)), s.b().clone());
            let inv = word_matrix(&s, &w.inverse()).unwrap();
            prop_assert!(m.mul_mat(&inv).is_identity());
            let sec = word_matrix(&s, &affine_section(&w)).unwrap();
            let sec_inv = word_matrix(&s, &affine_section(&w).inverse()).unwrap();
            prop_assert!(sec.mul_mat(&sec_inv).is_identity());
            prop_assert!(is_translation(&s, &m.mul_mat(&sec_inv)).unwrap());
        }
    }
}
