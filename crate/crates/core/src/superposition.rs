//! Resource theory of superposition on two qubits.
//!
//! Each qubit has two non-orthogonal free kets `|c0>`, `|c1>` with overlap
//! `s = <c0|c1>`, `0 < |s| < 1`. A unitary is superposition-free when it maps
//! every product `|c_k>|c_l>` to another such product up to a phase. By the
//! Gram-matrix criterion a permutation `π` of the four product labels is
//! realizable iff phases `e^{iφ_a}` exist with
//!
//! ```text
//! <a|b> = e^{i(φ_b − φ_a)} <π(a)|π(b)>   for all labels a, b.
//! ```
//!
//! Exactly eight of the 24 permutations pass; each is a short word in the swap
//! `V` and the local flip `W`.

use std::fmt;

use nalgebra::DVector;
use rand::Rng;
use thiserror::Error;

use crate::linalg::{
    self, cr, identity, CMatrix, Ket, LinalgError, Tensor, UnitaryOp, C64,
};
use crate::measures::{concurrence, MeasureError};
use crate::random::{haar_ket, rng_from_seed};

/// Margin by which `|s|` must stay inside `(0, 1)`.
pub const OVERLAP_MARGIN: f64 = 1e-9;
/// Tolerance for Gram moduli and phase-cycle closure.
pub const GRAM_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SuperpositionError {
    #[error("overlap modulus {0} must lie strictly between 0 and 1")]
    BadOverlap(f64),
    #[error("free kets must be single qubits")]
    NotQubit,
    #[error("constructed W is not unitary (deviation {0:e}); free basis is degenerate")]
    NonUnitaryW(f64),
    #[error("feasible permutation {0} has no known V/W word")]
    UnmatchedClass(Permutation),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
}

pub type Result<T> = std::result::Result<T, SuperpositionError>;

/// Pair of normalized, non-orthogonal, linearly independent qubit kets.
#[derive(Debug, Clone, PartialEq)]
pub struct FreeBasis {
    c0: Ket,
    c1: Ket,
    s: C64,
}

impl FreeBasis {
    pub fn new(c0: Ket, c1: Ket) -> Result<Self> {
        if c0.dim() != 2 || c1.dim() != 2 {
            return Err(SuperpositionError::NotQubit);
        }
        let s = c0.inner(&c1);
        let m = s.norm();
        if m <= OVERLAP_MARGIN || m >= 1.0 - OVERLAP_MARGIN {
            return Err(SuperpositionError::BadOverlap(m));
        }
        Ok(Self { c0, c1, s })
    }

    /// Canonical representative `c0 = |0>`, `c1 = s|0> + √(1−|s|²)|1>`.
    pub fn from_overlap(modulus: f64, arg: f64) -> Result<Self> {
        if !(modulus > OVERLAP_MARGIN && modulus < 1.0 - OVERLAP_MARGIN) {
            return Err(SuperpositionError::BadOverlap(modulus));
        }
        let s = C64::from_polar(modulus, arg);
        let c0 = Ket::basis(2, 0);
        let c1 = Ket::qubit(s, cr((1.0 - modulus * modulus).sqrt()))?;
        Self::new(c0, c1)
    }

    pub fn overlap(&self) -> C64 {
        self.s
    }

    pub fn ket(&self, k: u8) -> &Ket {
        if k == 0 {
            &self.c0
        } else {
            &self.c1
        }
    }

    /// `|c_k>|c_l>`.
    pub fn product(&self, label: ProductLabel) -> Ket {
        self.ket(label.first).tensor(self.ket(label.second))
    }

    /// `s / conj(s)`, the phase picked up by `W` on `|c1>`.
    pub fn phase_ratio(&self) -> C64 {
        phase_ratio(self.s)
    }
}

pub fn phase_ratio(s: C64) -> C64 {
    s / s.conj()
}

/// Product label `(k, l)` for `|c_k>|c_l>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProductLabel {
    pub first: u8,
    pub second: u8,
}

impl ProductLabel {
    pub const fn new(first: u8, second: u8) -> Self {
        Self { first, second }
    }

    /// Index `2k + l`.
    pub fn index(self) -> usize {
        (2 * self.first + self.second) as usize
    }

    pub fn from_index(i: usize) -> Self {
        Self::new((i / 2) as u8, (i % 2) as u8)
    }

    pub fn all() -> [ProductLabel; 4] {
        [0, 1, 2, 3].map(Self::from_index)
    }

    /// Labels in the row order used for phase tables: 00, 11, 01, 10.
    pub fn table_order() -> [ProductLabel; 4] {
        [
            Self::new(0, 0),
            Self::new(1, 1),
            Self::new(0, 1),
            Self::new(1, 0),
        ]
    }
}

impl fmt::Display for ProductLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.first, self.second)
    }
}

/// Single-qubit free-ket overlap `<c_i|c_j>`.
fn ket_overlap(i: u8, j: u8, s: C64) -> C64 {
    match (i, j) {
        (0, 1) => s,
        (1, 0) => s.conj(),
        _ => cr(1.0),
    }
}

/// `<c_k c_l | c_k' c_l'>`.
pub fn gram_entry(a: ProductLabel, b: ProductLabel, s: C64) -> C64 {
    ket_overlap(a.first, b.first, s) * ket_overlap(a.second, b.second, s)
}

/// Bijection on the four product labels, stored as images by label index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation([ProductLabel; 4]);

impl Permutation {
    pub fn identity() -> Self {
        Self(ProductLabel::all())
    }

    /// Panics unless `images` is a bijection.
    pub fn from_images(images: [ProductLabel; 4]) -> Self {
        let mut seen = [false; 4];
        for l in images {
            assert!(!seen[l.index()], "not a bijection");
            seen[l.index()] = true;
        }
        Self(images)
    }

    pub fn image(&self, label: ProductLabel) -> ProductLabel {
        self.0[label.index()]
    }

    /// All 24 permutations in lexicographic order of image indices.
    pub fn all() -> Vec<Permutation> {
        let mut out = Vec::with_capacity(24);
        let mut current = Vec::with_capacity(4);
        fn rec(current: &mut Vec<usize>, out: &mut Vec<Permutation>) {
            if current.len() == 4 {
                let images = [0, 1, 2, 3].map(|i| ProductLabel::from_index(current[i]));
                out.push(Permutation(images));
                return;
            }
            for v in 0..4 {
                if !current.contains(&v) {
                    current.push(v);
                    rec(current, out);
                    current.pop();
                }
            }
        }
        rec(&mut current, &mut out);
        out
    }

    /// `self ∘ other` (other first).
    pub fn after(&self, other: &Permutation) -> Permutation {
        Permutation(ProductLabel::all().map(|l| self.image(other.image(l))))
    }
}

impl fmt::Display for Permutation {
    /// `00>00 01>10 10>01 11>11` style, in label index order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = ProductLabel::all()
            .iter()
            .map(|&l| format!("{}>{}", l, self.image(l)))
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// Why a permutation is not superposition-free.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WitnessKind {
    /// `|<a|b>| ≠ |<π a|π b>|`: no phase can reconcile the entries.
    ModulusMismatch,
    /// Moduli agree but the phases forced along other pairs disagree with
    /// the phase this pair requires.
    PhaseCycle { forced: C64, required: C64 },
}

/// Concrete violated Gram constraint `<a|b> = e^{iΔ} <π a|π b>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GramWitness {
    pub a: ProductLabel,
    pub b: ProductLabel,
    /// `<a|b>`.
    pub source: C64,
    /// `<π(a)|π(b)>`.
    pub image: C64,
    pub kind: WitnessKind,
}

impl fmt::Display for GramWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            WitnessKind::ModulusMismatch => write!(
                f,
                "<{}|{}> = {:.6}{:+.6}i cannot equal a phase times {:.6}{:+.6}i (moduli {:.6} vs {:.6})",
                self.a,
                self.b,
                self.source.re,
                self.source.im,
                self.image.re,
                self.image.im,
                self.source.norm(),
                self.image.norm()
            ),
            WitnessKind::PhaseCycle { forced, required } => write!(
                f,
                "pair ({},{}) requires phase {:.6}{:+.6}i but other pairs force {:.6}{:+.6}i",
                self.a, self.b, required.re, required.im, forced.re, forced.im
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FeasibilityVerdict {
    /// Gauge-fixed phases (`e^{iφ_00} = 1`) indexed by label index.
    Feasible { phases: [C64; 4] },
    Infeasible(GramWitness),
}

impl FeasibilityVerdict {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Self::Feasible { .. })
    }
}

/// Decide whether `perm` is realizable by a unitary for overlap `s`.
pub fn gram_feasibility(perm: &Permutation, s: C64) -> FeasibilityVerdict {
    let order = ProductLabel::table_order();
    let mut pairs = Vec::with_capacity(6);
    for i in 0..4 {
        for j in (i + 1)..4 {
            pairs.push((order[i], order[j]));
        }
    }

    for &(a, b) in &pairs {
        let source = gram_entry(a, b, s);
        let image = gram_entry(perm.image(a), perm.image(b), s);
        if (source.norm() - image.norm()).abs() > GRAM_TOL {
            return FeasibilityVerdict::Infeasible(GramWitness {
                a,
                b,
                source,
                image,
                kind: WitnessKind::ModulusMismatch,
            });
        }
    }

    // every Gram entry is nonzero for 0 < |s|, so each pair fixes a phase
    // difference; propagate from φ_00 = 0 along the spanning star at 00
    let root = order[0];
    let mut phases: [Option<C64>; 4] = [None; 4];
    phases[root.index()] = Some(cr(1.0));
    for &b in &order[1..] {
        let source = gram_entry(root, b, s);
        let image = gram_entry(perm.image(root), perm.image(b), s);
        let ratio = source / image;
        phases[b.index()] = Some(ratio / ratio.norm());
    }
    let phases = phases.map(|p| p.expect("all labels reached from root"));

    for &(a, b) in &pairs {
        let source = gram_entry(a, b, s);
        let image = gram_entry(perm.image(a), perm.image(b), s);
        let required = source / image;
        let required = required / required.norm();
        let forced = phases[b.index()] / phases[a.index()];
        if (forced - required).norm() > GRAM_TOL {
            return FeasibilityVerdict::Infeasible(GramWitness {
                a,
                b,
                source,
                image,
                kind: WitnessKind::PhaseCycle { forced, required },
            });
        }
    }
    FeasibilityVerdict::Feasible { phases }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Letter {
    V,
    W,
}

/// Word over `{V, W}`; the matrix is the product in written order, so the
/// rightmost letter acts first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn parse(text: &str) -> Option<Word> {
        text.chars()
            .map(|ch| match ch {
                'V' | 'v' => Some(Letter::V),
                'W' | 'w' => Some(Letter::W),
                _ => None,
            })
            .collect::<Option<Vec<_>>>()
            .map(Word)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    /// Symbolic action on labels and phases, independent of any basis.
    pub fn action(&self, s: C64) -> (Permutation, [C64; 4]) {
        let ratio = phase_ratio(s);
        let mut perm = Permutation::identity();
        let mut phases = [cr(1.0); 4];
        for letter in self.0.iter().rev() {
            for label in ProductLabel::all() {
                let current = perm.image(label);
                let (next, factor) = match letter {
                    Letter::V => (ProductLabel::new(current.second, current.first), cr(1.0)),
                    Letter::W => {
                        let f = if current.first == 0 { cr(1.0) } else { ratio };
                        (ProductLabel::new(1 - current.first, current.second), f)
                    }
                };
                perm.0[label.index()] = next;
                phases[label.index()] *= factor;
            }
        }
        (perm, phases)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.0 {
            f.write_str(match l {
                Letter::V => "V",
                Letter::W => "W",
            })?;
        }
        Ok(())
    }
}

/// The eight superposition-free unitaries: display name and word, in
/// canonical column order.
pub const CLASS_WORDS: [(&str, &str); 8] = [
    ("V^2", "VV"),
    ("V", "V"),
    ("WVW", "WVW"),
    ("(VW)^2", "VWVW"),
    ("W", "W"),
    ("WV", "WV"),
    ("VWV", "VWV"),
    ("VW", "VW"),
];

/// One feasible permutation with its gauge-fixed phases and realizing word.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperpositionFreeClass {
    pub name: &'static str,
    pub word: Word,
    pub permutation: Permutation,
    /// Indexed by label index (00, 01, 10, 11).
    pub phases: [C64; 4],
}

impl SuperpositionFreeClass {
    pub fn phase(&self, label: ProductLabel) -> C64 {
        self.phases[label.index()]
    }

    /// The unique unitary with `U|c_k c_l> = e^{iφ_kl}|π(k,l)>`, built as `Q P⁻¹`.
    pub fn matrix(&self, basis: &FreeBasis) -> Result<UnitaryOp> {
        let mut p = CMatrix::zeros(4, 4);
        let mut q = CMatrix::zeros(4, 4);
        for label in ProductLabel::all() {
            let i = label.index();
            p.set_column(i, basis.product(label).amplitudes());
            let target = basis.product(self.permutation.image(label));
            q.set_column(i, &(target.amplitudes() * self.phases[i]));
        }
        let p_inv = p
            .try_inverse()
            .ok_or(SuperpositionError::BadOverlap(basis.s.norm()))?;
        Ok(UnitaryOp::new(q * p_inv)?)
    }
}

#[derive(Debug, Clone)]
pub struct Classification {
    pub overlap: C64,
    /// In `CLASS_WORDS` order.
    pub classes: Vec<SuperpositionFreeClass>,
    /// Rejected permutations in lexicographic order.
    pub infeasible: Vec<(Permutation, GramWitness)>,
}

/// Run the Gram test over all 24 permutations and attach V/W words.
pub fn enumerate_classes(s: C64) -> Result<Classification> {
    let m = s.norm();
    if m <= OVERLAP_MARGIN || m >= 1.0 - OVERLAP_MARGIN {
        return Err(SuperpositionError::BadOverlap(m));
    }
    let mut feasible = Vec::new();
    let mut infeasible = Vec::new();
    for perm in Permutation::all() {
        match gram_feasibility(&perm, s) {
            FeasibilityVerdict::Feasible { phases } => feasible.push((perm, phases)),
            FeasibilityVerdict::Infeasible(w) => infeasible.push((perm, w)),
        }
    }

    let words: Vec<(&'static str, Word, Permutation)> = CLASS_WORDS
        .iter()
        .map(|&(name, text)| {
            let word = Word::parse(text).expect("static word");
            let (perm, _) = word.action(s);
            (name, word, perm)
        })
        .collect();

    let mut classes = Vec::with_capacity(8);
    for (name, word, perm) in &words {
        if let Some((_, phases)) = feasible.iter().find(|(p, _)| p == perm) {
            classes.push(SuperpositionFreeClass {
                name,
                word: word.clone(),
                permutation: *perm,
                phases: *phases,
            });
        }
    }
    if let Some((perm, _)) = feasible
        .iter()
        .find(|(p, _)| !words.iter().any(|(_, _, wp)| wp == p))
    {
        return Err(SuperpositionError::UnmatchedClass(*perm));
    }
    Ok(Classification {
        overlap: s,
        classes,
        infeasible,
    })
}

/// Swap `Σ|ij><ji|`.
pub fn build_v() -> UnitaryOp {
    let mut m = CMatrix::zeros(4, 4);
    for i in 0..2 {
        for j in 0..2 {
            m[(2 * i + j, 2 * j + i)] = cr(1.0);
        }
    }
    UnitaryOp::new(m).expect("permutation matrix")
}

/// Single-qubit `w` with `w|c_k> = e^{iφ_k}|c_{k⊕1}>`, solved from `w B = B M`.
pub fn build_w_local(basis: &FreeBasis) -> Result<UnitaryOp> {
    let b = CMatrix::from_columns(&[
        basis.c0.amplitudes().clone(),
        basis.c1.amplitudes().clone(),
    ]);
    let m = linalg::matrix_from_rows(&[&[cr(0.0), basis.phase_ratio()], &[cr(1.0), cr(0.0)]]);
    let b_inv = b
        .clone()
        .try_inverse()
        .ok_or(SuperpositionError::BadOverlap(basis.s.norm()))?;
    let w = &b * m * b_inv;
    let err = linalg::MatrixCandidate(w.clone()).unitarity_error();
    if err > linalg::CONSTRUCTION_TOL {
        return Err(SuperpositionError::NonUnitaryW(err));
    }
    Ok(UnitaryOp::new(w)?)
}

/// `W = w ⊗ I`.
pub fn build_w(basis: &FreeBasis) -> Result<UnitaryOp> {
    Ok(build_w_local(basis)?.tensor(&UnitaryOp::identity(2)))
}

pub fn word_to_matrix(word: &Word, basis: &FreeBasis) -> Result<UnitaryOp> {
    let v = build_v();
    let w = build_w(basis)?;
    let mut acc = identity(4);
    for letter in word.letters() {
        let m = match letter {
            Letter::V => v.matrix(),
            Letter::W => w.matrix(),
        };
        acc *= m;
    }
    Ok(UnitaryOp::new(acc)?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoGoReport {
    pub samples: usize,
    pub max_concurrence: f64,
}

/// Largest output concurrence of `u` over Haar-random product inputs.
pub fn nogo_check(u: &UnitaryOp, samples: usize, seed: u64) -> Result<NoGoReport> {
    let mut rng = rng_from_seed(seed);
    let mut max_c: f64 = 0.0;
    for _ in 0..samples {
        let a = haar_ket(&mut rng, 2);
        let b = haar_ket(&mut rng, 2);
        let input = a.tensor(&b);
        let out = Ket::normalize(vec![2, 2], u.matrix() * input.amplitudes())?;
        max_c = max_c.max(concurrence(&out.projector())?);
    }
    Ok(NoGoReport {
        samples,
        max_concurrence: max_c,
    })
}

/// Random overlap with `|s|` uniform in `(lo, hi)` and uniform phase.
pub fn sample_overlap<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> C64 {
    let m = lo + (hi - lo) * rng.random::<f64>();
    let arg = std::f64::consts::TAU * rng.random::<f64>();
    C64::from_polar(m, arg)
}

/// Permutation of the orthogonal-encoding CNOT: `|k,l> → |k, l⊕k>`.
pub fn cnot_permutation() -> Permutation {
    Permutation::from_images(
        ProductLabel::all().map(|l| ProductLabel::new(l.first, l.second ^ l.first)),
    )
}

/// Max deviation of `U|c_k c_l>` from `e^{iφ_kl}|π(k,l)>` over all labels.
pub fn action_error(u: &UnitaryOp, class: &SuperpositionFreeClass, basis: &FreeBasis) -> f64 {
    ProductLabel::all()
        .iter()
        .map(|&l| {
            let out = u.matrix() * basis.product(l).amplitudes();
            let expect: DVector<C64> =
                basis.product(class.permutation.image(l)).amplitudes() * class.phase(l);
            linalg::vec_max_abs(&(out - expect))
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn ket01() -> Ket {
        Ket::basis(2, 0).tensor(&Ket::basis(2, 1))
    }

    #[test]
    fn v_swaps_and_is_an_involution() {
        let v = build_v();
        let out = v.matrix() * ket01().amplitudes();
        assert!((out[2] - cr(1.0)).norm() < 1e-15);
        let v2 = v.compose(&v).unwrap();
        assert!(linalg::max_abs_diff(v2.matrix(), &identity(4)) < 1e-15);
        let basis = FreeBasis::from_overlap(0.4, 0.3).unwrap();
        let l01 = ProductLabel::new(0, 1);
        let swapped = v.matrix() * basis.product(l01).amplitudes();
        let expect = basis.product(ProductLabel::new(1, 0));
        assert!(linalg::vec_max_abs(&(swapped - expect.amplitudes())) < 1e-14);
    }

    #[test]
    fn w_phases() {
        let real = FreeBasis::from_overlap(0.5, 0.0).unwrap();
        assert!((real.phase_ratio() - cr(1.0)).norm() < 1e-15);
        let alpha = 0.7;
        let complex = FreeBasis::from_overlap(0.5, alpha).unwrap();
        assert!((complex.phase_ratio() - C64::from_polar(1.0, 2.0 * alpha)).norm() < 1e-14);
        let w = build_w_local(&real).unwrap();
        let err = linalg::max_abs_diff(&(w.matrix().adjoint() * w.matrix()), &identity(2));
        assert!(err < 1e-12);
    }

    #[test]
    fn w_maps_free_kets() {
        let basis = FreeBasis::from_overlap(0.6, 1.1).unwrap();
        let w = build_w_local(&basis).unwrap();
        let out0 = w.matrix() * basis.ket(0).amplitudes();
        assert!(linalg::vec_max_abs(&(out0 - basis.ket(1).amplitudes())) < 1e-12);
        let out1 = w.matrix() * basis.ket(1).amplitudes();
        assert!(linalg::vec_max_abs(&(out1 - basis.ket(0).amplitudes() * basis.phase_ratio())) < 1e-12);
    }

    #[test]
    fn free_basis_rejects_bad_overlaps() {
        assert!(FreeBasis::from_overlap(0.0, 0.0).is_err());
        assert!(FreeBasis::from_overlap(1.0, 0.0).is_err());
        assert!(FreeBasis::new(Ket::basis(2, 0), Ket::basis(2, 1)).is_err());
        assert!(FreeBasis::new(Ket::basis(2, 0), Ket::basis(2, 0)).is_err());
        assert!(enumerate_classes(cr(1.0)).is_err());
    }

    #[test]
    fn identity_permutation_is_feasible_with_unit_phases() {
        let v = gram_feasibility(&Permutation::identity(), C64::from_polar(0.5, 0.4));
        match v {
            FeasibilityVerdict::Feasible { phases } => {
                assert!(phases.iter().all(|p| (p - cr(1.0)).norm() < 1e-12))
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn superposition_cnot_is_rejected_at_the_00_11_pair() {
        let s = C64::from_polar(0.5, 0.3);
        match gram_feasibility(&cnot_permutation(), s) {
            FeasibilityVerdict::Infeasible(w) => {
                assert_eq!((w.a, w.b), (ProductLabel::new(0, 0), ProductLabel::new(1, 1)));
                assert!((w.source - s * s).norm() < 1e-14);
                assert!((w.image - s).norm() < 1e-14);
                assert_eq!(w.kind, WitnessKind::ModulusMismatch);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn class5_phases_match_w_column() {
        let s = C64::from_polar(0.5, PI / 7.0);
        let perm = Word::parse("W").unwrap().action(s).0;
        let ratio = phase_ratio(s);
        match gram_feasibility(&perm, s) {
            FeasibilityVerdict::Feasible { phases } => {
                let p = |k, l| phases[ProductLabel::new(k, l).index()];
                assert!((p(0, 0) - cr(1.0)).norm() < 1e-12);
                assert!((p(0, 1) - cr(1.0)).norm() < 1e-12);
                assert!((p(1, 1) - ratio).norm() < 1e-12);
                assert!((p(1, 0) - ratio).norm() < 1e-12);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn eight_classes_in_column_order() {
        let s = C64::from_polar(0.5, PI / 7.0);
        let cl = enumerate_classes(s).unwrap();
        assert_eq!(cl.classes.len(), 8);
        assert_eq!(cl.infeasible.len(), 16);
        let names: Vec<&str> = cl.classes.iter().map(|c| c.name).collect();
        assert_eq!(names, ["V^2", "V", "WVW", "(VW)^2", "W", "WV", "VWV", "VW"]);
        assert!(cl.infeasible.iter().any(|(p, _)| *p == cnot_permutation()));
    }

    #[test]
    fn words_reproduce_class_actions() {
        let basis = FreeBasis::from_overlap(0.5, PI / 7.0).unwrap();
        let cl = enumerate_classes(basis.overlap()).unwrap();
        for class in &cl.classes {
            let u = word_to_matrix(&class.word, &basis).unwrap();
            assert!(action_error(&u, class, &basis) < 1e-10, "{}", class.name);
            let direct = class.matrix(&basis).unwrap();
            assert!(linalg::max_abs_diff(u.matrix(), direct.matrix()) < 1e-10);
        }
    }

    #[test]
    fn word_examples() {
        let basis = FreeBasis::from_overlap(0.5, 0.0).unwrap();
        let empty = word_to_matrix(&Word(vec![]), &basis).unwrap();
        assert!(linalg::max_abs_diff(empty.matrix(), &identity(4)) < 1e-15);
        let vv = word_to_matrix(&Word::parse("VV").unwrap(), &basis).unwrap();
        assert!(linalg::max_abs_diff(vv.matrix(), &identity(4)) < 1e-15);
        let wvw = word_to_matrix(&Word::parse("WVW").unwrap(), &basis).unwrap();
        let out = wvw.matrix() * basis.product(ProductLabel::new(1, 1)).amplitudes();
        let expect = basis.product(ProductLabel::new(0, 0));
        assert!(linalg::vec_max_abs(&(out - expect.amplitudes())) < 1e-12);
    }

    #[test]
    fn nogo_controls() {
        let v = build_v();
        let bell = linalg::bell_phi_plus().evolve(&v).unwrap();
        assert!((concurrence(&bell).unwrap() - 1.0).abs() < 1e-9);
        let basis = FreeBasis::from_overlap(0.5, 0.2).unwrap();
        let w = build_w(&basis).unwrap();
        assert!(nogo_check(&w, 200, 3).unwrap().max_concurrence < 1e-9);
    }

    #[test]
    fn permutation_enumeration_is_complete() {
        let all = Permutation::all();
        assert_eq!(all.len(), 24);
        let mut dedup = all.clone();
        dedup.sort();
        dedup.dedup();
        assert_eq!(dedup.len(), 24);
        assert_eq!(all[0], Permutation::identity());
    }
}
