//! Hankel and skip-column determinants of an element sequence, plus the
//! determinant-identity suites used to validate the closed-form construction.
//!
//! For a sequence `B_k` the table evaluates
//!
//! * `delta(k, l)`: the k-by-k Hankel determinant `det(B_{i+j+l})`, with the
//!   conventions `delta(0, l) = 1` and `delta(k, l) = 0` for `k < 0`;
//! * `gee(k, l)`: the k-by-k determinant whose first column is
//!   `B_l, ..., B_{l+k-1}` and whose remaining columns skip index `l+1`
//!   (entry `(i, c) = B_{l+i+c+1}` for `c >= 1`), with `gee(k, l) = 0` for
//!   `k <= 0`.
//!
//! The `check_*` functions return residual reports instead of booleans so the
//! float path can report magnitudes; on the exact path every residual must be
//! exactly zero.
//!
//! Two families of identities are unconditional (they hold for an arbitrary
//! sequence): the bilinear ones ([`check_bilinear`]) and their multi-term
//! combinations ([`check_combined`]). The linear family
//! ([`check_vandermonde`], [`check_offset_identities`]) and the telescoping
//! sums ([`check_sums`]) assume the sequence is a weighted power sum
//! ([`PowerSumLaw`]). The note on [`check_offset_identities`] explains one
//! superscript correction relative to the usual statement of the fifth offset
//! relation.

use std::collections::HashMap;
use std::fmt;
use std::sync::Mutex;

use thiserror::Error;

use crate::moments::{MomentError, MomentSource, MomentSystem};
use crate::numeric::{det, poly_det, powi, DensePolynomial, Matrix, Rational, Scalar};

pub mod battery;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HankelError {
    /// An element outside the sequence's available range was requested.
    /// Never silently treated as zero.
    #[error("element index {index} outside available range [{lo}, {hi}]")]
    Index { index: i64, lo: i64, hi: i64 },
    /// A denominator in a telescoping-sum identity vanished.
    #[error("singular denominator: {0}")]
    Singular(String),
    #[error(transparent)]
    Moment(#[from] MomentError),
}

/// Element ring the tables work over: the two scalar fields plus polynomials
/// (for derivative checks in the polynomial-moment regime). Supplies the
/// determinant kernel used for that element type.
pub trait HankelElem: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync + 'static {
    fn elem_zero() -> Self;
    fn elem_one() -> Self;
    fn elem_is_zero(&self) -> bool;
    fn elem_magnitude(&self) -> f64;
    fn elem_det(m: &Matrix<Self>) -> Self;
    fn residual_json(&self) -> serde_json::Value;
}

impl HankelElem for f64 {
    fn elem_zero() -> Self {
        0.0
    }
    fn elem_one() -> Self {
        1.0
    }
    fn elem_is_zero(&self) -> bool {
        *self == 0.0
    }
    fn elem_magnitude(&self) -> f64 {
        self.abs()
    }
    fn elem_det(m: &Matrix<Self>) -> Self {
        det(m)
    }
    fn residual_json(&self) -> serde_json::Value {
        serde_json::json!(self)
    }
}

impl HankelElem for Rational {
    fn elem_zero() -> Self {
        Rational::from(0)
    }
    fn elem_one() -> Self {
        Rational::from(1)
    }
    fn elem_is_zero(&self) -> bool {
        Scalar::is_zero(self)
    }
    fn elem_magnitude(&self) -> f64 {
        Scalar::magnitude(self)
    }
    fn elem_det(m: &Matrix<Self>) -> Self {
        det(m)
    }
    fn residual_json(&self) -> serde_json::Value {
        if Scalar::is_zero(self) {
            serde_json::json!("0(exact)")
        } else {
            serde_json::json!(self.to_string())
        }
    }
}

impl<T: Scalar> HankelElem for DensePolynomial<T> {
    fn elem_zero() -> Self {
        DensePolynomial::zero()
    }
    fn elem_one() -> Self {
        DensePolynomial::one()
    }
    fn elem_is_zero(&self) -> bool {
        self.is_zero()
    }
    fn elem_magnitude(&self) -> f64 {
        self.coeffs().iter().map(|c| c.magnitude()).fold(0.0, f64::max)
    }
    fn elem_det(m: &Matrix<Self>) -> Self {
        poly_det(m)
    }
    fn residual_json(&self) -> serde_json::Value {
        if T::EXACT && self.is_zero() {
            serde_json::json!("0(exact)")
        } else {
            serde_json::json!(self.to_string())
        }
    }
}

/// An indexed provider of elements `B_k` over a contiguous integer range.
pub trait ElementSeq {
    type Elem: HankelElem;
    /// Closed range `[lo, hi]` of available indices.
    fn bounds(&self) -> (i64, i64);
    fn element(&self, k: i64) -> Result<Self::Elem, HankelError>;
}

/// A stored sequence with explicit start index.
#[derive(Clone, Debug)]
pub struct RawSeq<T> {
    start: i64,
    items: Vec<T>,
}

impl<T: HankelElem> RawSeq<T> {
    pub fn new(start: i64, items: Vec<T>) -> Self {
        assert!(!items.is_empty(), "empty sequence");
        RawSeq { start, items }
    }

    pub fn items(&self) -> &[T] {
        &self.items
    }

    pub fn items_mut(&mut self) -> &mut [T] {
        &mut self.items
    }
}

impl<T: HankelElem> ElementSeq for RawSeq<T> {
    type Elem = T;
    fn bounds(&self) -> (i64, i64) {
        (self.start, self.start + self.items.len() as i64 - 1)
    }
    fn element(&self, k: i64) -> Result<T, HankelError> {
        let (lo, hi) = self.bounds();
        if k < lo || k > hi {
            return Err(HankelError::Index { index: k, lo, hi });
        }
        Ok(self.items[(k - lo) as usize].clone())
    }
}

/// Elements of the form `B_k = Σ_j b_j mu_j^k`, optionally with an extra
/// center weight `b_0` sitting at node `mu_0 = 0` (so it contributes only to
/// `B_0`, by the convention `0^0 = 1`, and never to `B_{-1}`).
#[derive(Clone, Debug)]
pub struct PowerSumLaw<T: Scalar> {
    weights: Vec<T>,
    nodes: Vec<T>,
    center: Option<T>,
}

impl<T: Scalar> PowerSumLaw<T> {
    pub fn new(weights: Vec<T>, nodes: Vec<T>) -> Self {
        Self::build(weights, nodes, None)
    }

    pub fn with_center(weights: Vec<T>, nodes: Vec<T>, center: T) -> Self {
        Self::build(weights, nodes, Some(center))
    }

    fn build(weights: Vec<T>, nodes: Vec<T>, center: Option<T>) -> Self {
        assert_eq!(weights.len(), nodes.len(), "one weight per node");
        assert!(!nodes.is_empty(), "at least one node");
        assert!(nodes.iter().all(|m| !m.is_zero()), "nodes must be nonzero");
        PowerSumLaw { weights, nodes, center }
    }

    pub fn n(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn element_at(&self, k: i64) -> T {
        let mut acc = match (&self.center, k) {
            (Some(c), 0) => c.clone(),
            _ => T::zero(),
        };
        for (b, mu) in self.weights.iter().zip(&self.nodes) {
            acc = acc.add(&b.mul(&powi(mu, k)));
        }
        acc
    }

    /// `Π_{i<j} (mu_j - mu_i)^2`
    pub fn vandermonde_sq(&self) -> T {
        let mut acc = T::one();
        for i in 0..self.nodes.len() {
            for j in i + 1..self.nodes.len() {
                let d = self.nodes[j].sub(&self.nodes[i]);
                acc = acc.mul(&d.mul(&d));
            }
        }
        acc
    }

    /// `Π_i b_i mu_i^l`
    pub fn weighted_node_product(&self, l: i64) -> T {
        let mut acc = T::one();
        for (b, mu) in self.weights.iter().zip(&self.nodes) {
            acc = acc.mul(&b.mul(&powi(mu, l)));
        }
        acc
    }

    /// `Π_i b_i`
    pub fn weight_product(&self) -> T {
        let mut acc = T::one();
        for b in &self.weights {
            acc = acc.mul(b);
        }
        acc
    }

    /// Materializes the elements over the closed index window `[lo, hi]`.
    pub fn seq(&self, lo: i64, hi: i64) -> RawSeq<T>
    where
        T: HankelElem,
    {
        RawSeq::new(lo, (lo..=hi).map(|k| self.element_at(k)).collect())
    }
}

impl<T: Scalar + HankelElem> ElementSeq for PowerSumLaw<T> {
    type Elem = T;
    fn bounds(&self) -> (i64, i64) {
        (i64::MIN / 4, i64::MAX / 4)
    }
    fn element(&self, k: i64) -> Result<T, HankelError> {
        Ok(self.element_at(k))
    }
}

/// Moment sequence of a [`MomentSystem`] frozen at one time.
#[derive(Clone, Debug)]
pub struct MomentSeq<'a, T: Scalar> {
    sys: &'a MomentSystem<T>,
    t: T,
}

impl<'a, T: Scalar> MomentSeq<'a, T>
where
    MomentSystem<T>: MomentSource<T>,
{
    pub fn new(sys: &'a MomentSystem<T>, t: T) -> Self {
        MomentSeq { sys, t }
    }
}

impl<'a, T: Scalar + HankelElem> ElementSeq for MomentSeq<'a, T>
where
    MomentSystem<T>: MomentSource<T>,
{
    type Elem = T;
    fn bounds(&self) -> (i64, i64) {
        (-1, i64::MAX / 4)
    }
    fn element(&self, k: i64) -> Result<T, HankelError> {
        let (lo, hi) = self.bounds();
        if k < lo {
            return Err(HankelError::Index { index: k, lo, hi });
        }
        Ok(self.sys.moment(k, &self.t)?)
    }
}

/// Moment sequence as exact polynomials in `t` (polynomial regime only).
#[derive(Clone, Debug)]
pub struct PolyMomentSeq<'a> {
    sys: &'a MomentSystem<Rational>,
}

impl<'a> PolyMomentSeq<'a> {
    pub fn new(sys: &'a MomentSystem<Rational>) -> Self {
        PolyMomentSeq { sys }
    }
}

impl<'a> ElementSeq for PolyMomentSeq<'a> {
    type Elem = DensePolynomial<Rational>;
    fn bounds(&self) -> (i64, i64) {
        (-1, i64::MAX / 4)
    }
    fn element(&self, k: i64) -> Result<Self::Elem, HankelError> {
        let (lo, hi) = self.bounds();
        if k < lo {
            return Err(HankelError::Index { index: k, lo, hi });
        }
        Ok(self.sys.moment_poly(k)?)
    }
}

/// Determinant evaluator over an element sequence, memoized by `(k, l)`.
/// The source's time is baked in at construction; a table is a single-time
/// snapshot. Immutable (and shareable) after construction.
pub struct HankelTable<S: ElementSeq> {
    src: S,
    delta_cache: Mutex<HashMap<(i64, i64), S::Elem>>,
    gee_cache: Mutex<HashMap<(i64, i64), S::Elem>>,
}

impl<S: ElementSeq> HankelTable<S> {
    pub fn new(src: S) -> Self {
        HankelTable {
            src,
            delta_cache: Mutex::new(HashMap::new()),
            gee_cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn source(&self) -> &S {
        &self.src
    }

    fn require(&self, lo: i64, hi: i64) -> Result<(), HankelError> {
        let (alo, ahi) = self.src.bounds();
        if lo < alo {
            return Err(HankelError::Index { index: lo, lo: alo, hi: ahi });
        }
        if hi > ahi {
            return Err(HankelError::Index { index: hi, lo: alo, hi: ahi });
        }
        Ok(())
    }

    /// The k-by-k Hankel determinant with top-left element `B_l`.
    pub fn delta(&self, k: i64, l: i64) -> Result<S::Elem, HankelError> {
        if k < 0 {
            return Ok(S::Elem::elem_zero());
        }
        if k == 0 {
            return Ok(S::Elem::elem_one());
        }
        if let Some(v) = self.delta_cache.lock().unwrap().get(&(k, l)) {
            return Ok(v.clone());
        }
        self.require(l, l + 2 * k - 2)?;
        let n = k as usize;
        let mut rows = Vec::with_capacity(n);
        for i in 0..n {
            let mut row = Vec::with_capacity(n);
            for j in 0..n {
                row.push(self.src.element(i as i64 + j as i64 + l)?);
            }
            rows.push(row);
        }
        let value = S::Elem::elem_det(&Matrix::from_rows(rows));
        self.delta_cache.lock().unwrap().insert((k, l), value.clone());
        Ok(value)
    }

    /// The k-by-k skip-column determinant: first column `B_{l+i}`, remaining
    /// columns `B_{l+i+c+1}`.
    pub fn gee(&self, k: i64, l: i64) -> Result<S::Elem, HankelError> {
        if k <= 0 {
            return Ok(S::Elem::elem_zero());
        }
        if let Some(v) = self.gee_cache.lock().unwrap().get(&(k, l)) {
            return Ok(v.clone());
        }
        self.require(l, l + 2 * k - 1)?;
        let n = k as usize;
        let mut rows = Vec::with_capacity(n);
        for i in 0..n {
            let mut row = Vec::with_capacity(n);
            for c in 0..n {
                let skip = if c > 0 { 1 } else { 0 };
                row.push(self.src.element(l + i as i64 + c as i64 + skip)?);
            }
            rows.push(row);
        }
        let value = S::Elem::elem_det(&Matrix::from_rows(rows));
        self.gee_cache.lock().unwrap().insert((k, l), value.clone());
        Ok(value)
    }
}

/// One evaluated identity instance.
#[derive(Clone, Debug)]
pub struct ResidualEntry<T> {
    pub identity: &'static str,
    pub k: i64,
    pub l: i64,
    pub residual: T,
}

/// A batch of identity residuals.
#[derive(Clone, Debug)]
pub struct ResidualReport<T> {
    pub entries: Vec<ResidualEntry<T>>,
}

impl<T: HankelElem> ResidualReport<T> {
    pub fn all_exactly_zero(&self) -> bool {
        self.entries.iter().all(|e| e.residual.elem_is_zero())
    }

    pub fn max_magnitude(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| e.residual.elem_magnitude())
            .fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.entries
                .iter()
                .map(|e| {
                    serde_json::json!({
                        "identity": e.identity,
                        "k": e.k,
                        "l": e.l,
                        "residual": e.residual.residual_json(),
                    })
                })
                .collect(),
        )
    }
}

fn entry<T>(identity: &'static str, k: i64, l: i64, residual: T) -> ResidualEntry<T> {
    ResidualEntry { identity, k, l, residual }
}

/// Rank and product structure of pure power-sum sequences (no center weight):
/// `delta(N, l)` factors through the squared Vandermonde of the nodes, and
/// every larger determinant vanishes. The table must be backed by the
/// elements the law generates; `law` supplies the right-hand-side products.
pub fn check_vandermonde<S: ElementSeq>(
    tbl: &HankelTable<S>,
    law: &PowerSumLaw<S::Elem>,
    l: i64,
) -> Result<ResidualReport<S::Elem>, HankelError>
where
    S::Elem: Scalar,
{
    let n = law.n() as i64;
    let mut entries = Vec::new();

    let product = law.weighted_node_product(l).mul(&law.vandermonde_sq());
    entries.push(entry("linear.product", n, l, tbl.delta(n, l)?.sub(&product)));
    entries.push(entry("linear.rank", n + 1, l, tbl.delta(n + 1, l)?));
    entries.push(entry("linear.rank", n + 2, l, tbl.delta(n + 2, l)?));
    Ok(ResidualReport { entries })
}

/// The five relations for a power-sum law with center weight `1/2` at node 0.
///
/// With `G := delta` on the centered sequence and `F := gee`:
/// 1. `G_N^0 - 1/2 G_{N-1}^2  =  Π b_i Π (mu_j - mu_i)^2`
/// 2. `G_N^l  =  Π b_i mu_i^l Π (mu_j - mu_i)^2` for `l >= 1`
/// 3. `G_k^0 - 1/2 G_{k-1}^2  =  0` for `k > N`
/// 4. `G_k^l  =  0` for `k > N`, `l >= 1`
/// 5. `G_{N+1}^{-1} + F_N^0 - 1/4 G_{N-1}^3  =  0`
///
/// The fifth relation is usually quoted with `G_{N-1}^0` in the last term;
/// expanding the center corrections of the (N+1)-by-(N+1) determinant shows
/// the second-order minor is the one starting at `B_3`, i.e. `G_{N-1}^3`.
/// Both agree at `N = 1` (each is the empty determinant); only the `B_3`
/// form telescopes to zero for `N >= 2`, which the exact suite verifies.
///
/// The table must be backed by the centered sequence; `law` supplies the
/// products on the right-hand sides.
pub fn check_offset_identities<S: ElementSeq>(
    tbl: &HankelTable<S>,
    law: &PowerSumLaw<S::Elem>,
    l_pos: i64,
    k_above: i64,
) -> Result<ResidualReport<S::Elem>, HankelError>
where
    S::Elem: Scalar,
{
    assert!(l_pos >= 1, "l_pos must be >= 1");
    let n = law.n() as i64;
    assert!(k_above > n, "k_above must exceed the node count");
    let half = S::Elem::from_ratio(1, 2);
    let quarter = S::Elem::from_ratio(1, 4);
    let v2 = law.vandermonde_sq();
    let mut entries = Vec::new();

    let lhs1 = tbl.delta(n, 0)?.sub(&half.mul(&tbl.delta(n - 1, 2)?));
    entries.push(entry("offset.1", n, 0, lhs1.sub(&law.weight_product().mul(&v2))));

    let rhs2 = law.weighted_node_product(l_pos).mul(&v2);
    entries.push(entry("offset.2", n, l_pos, tbl.delta(n, l_pos)?.sub(&rhs2)));

    let lhs3 = tbl.delta(k_above, 0)?.sub(&half.mul(&tbl.delta(k_above - 1, 2)?));
    entries.push(entry("offset.3", k_above, 0, lhs3));

    entries.push(entry("offset.4", k_above, l_pos, tbl.delta(k_above, l_pos)?));

    let lhs5 = tbl
        .delta(n + 1, -1)?
        .add(&tbl.gee(n, 0)?)
        .sub(&quarter.mul(&tbl.delta(n - 1, 3)?));
    entries.push(entry("offset.5", n + 1, -1, lhs5));

    Ok(ResidualReport { entries })
}

/// The four bilinear identities, valid for an arbitrary element sequence and
/// any `k >= -1`:
/// 1. `D_{k+2}^{l-1} D_k^{l+1} = D_{k+1}^{l-1} D_{k+1}^{l+1} - (D_{k+1}^l)^2`
/// 2. `D_{k+1}^{l-1} D_k^{l+1} = G_{k+1}^{l-1} D_k^l - G_k^{l-1} D_{k+1}^l`
/// 3. `D_{k+1}^l G_k^l = D_k^{l+1} G_{k+1}^{l-1} - D_{k+1}^{l-1} D_k^{l+2}`
/// 4. `D_{k+2}^{l-1} D_k^{l+2} = D_{k+1}^{l+1} G_{k+1}^{l-1} - D_{k+1}^l G_{k+1}^l`
///
/// (`D` = `delta`, `G` = `gee`.)
pub fn check_bilinear<S: ElementSeq>(
    tbl: &HankelTable<S>,
    k: i64,
    l: i64,
) -> Result<ResidualReport<S::Elem>, HankelError>
where
    S::Elem: Scalar,
{
    assert!(k >= -1, "bilinear identities stated for k >= -1");
    let d = |kk: i64, ll: i64| tbl.delta(kk, ll);
    let g = |kk: i64, ll: i64| tbl.gee(kk, ll);
    let mut entries = Vec::new();

    let lhs = d(k + 2, l - 1)?.mul(&d(k, l + 1)?);
    let rhs = d(k + 1, l - 1)?.mul(&d(k + 1, l + 1)?).sub(&{
        let x = d(k + 1, l)?;
        x.mul(&x)
    });
    entries.push(entry("bilinear.1", k, l, lhs.sub(&rhs)));

    let lhs = d(k + 1, l - 1)?.mul(&d(k, l + 1)?);
    let rhs = g(k + 1, l - 1)?.mul(&d(k, l)?).sub(&g(k, l - 1)?.mul(&d(k + 1, l)?));
    entries.push(entry("bilinear.2", k, l, lhs.sub(&rhs)));

    let lhs = d(k + 1, l)?.mul(&g(k, l)?);
    let rhs = d(k, l + 1)?.mul(&g(k + 1, l - 1)?).sub(&d(k + 1, l - 1)?.mul(&d(k, l + 2)?));
    entries.push(entry("bilinear.3", k, l, lhs.sub(&rhs)));

    let lhs = d(k + 2, l - 1)?.mul(&d(k, l + 2)?);
    let rhs = d(k + 1, l + 1)?.mul(&g(k + 1, l - 1)?).sub(&d(k + 1, l)?.mul(&g(k + 1, l)?));
    entries.push(entry("bilinear.4", k, l, lhs.sub(&rhs)));

    Ok(ResidualReport { entries })
}

/// The four telescoping-sum identities for a centered power-sum sequence with
/// `n` nodes and `0 <= k <= n-1`. All `delta(_, 1)` denominators in range must
/// be nonzero (one sufficient condition: all nodes of the same sign).
pub fn check_sums<S: ElementSeq>(
    tbl: &HankelTable<S>,
    n: usize,
    k: i64,
) -> Result<ResidualReport<S::Elem>, HankelError>
where
    S::Elem: Scalar,
{
    let n = n as i64;
    assert!((0..n).contains(&k), "stated for 0 <= k <= n-1");
    let d = |kk: i64, ll: i64| tbl.delta(kk, ll);
    let g = |kk: i64, ll: i64| tbl.gee(kk, ll);
    let denom = |kk: i64| -> Result<S::Elem, HankelError> {
        let v = d(kk, 1)?;
        if v.is_zero() {
            return Err(HankelError::Singular(format!("delta({kk}, 1) = 0")));
        }
        Ok(v)
    };

    // partial sums of term(l) = num(l) / (delta(l+1,1) delta(l,1))
    let sum_over = |lo: i64,
                    hi: i64,
                    num: &dyn Fn(i64) -> Result<S::Elem, HankelError>|
     -> Result<S::Elem, HankelError> {
        let mut acc = S::Elem::zero();
        for l in lo..=hi {
            let term = num(l)?.div(&denom(l + 1)?.mul(&denom(l)?));
            acc = acc.add(&term);
        }
        Ok(acc)
    };

    let sq = |x: S::Elem| x.mul(&x);
    let mut entries = Vec::new();

    // 1: Σ_{l=k+1}^{n-1} (D_{l+1}^0)^2 / (D_{l+1}^1 D_l^1)
    //      = D_{k+2}^{-1} / D_{k+1}^1 - D_{n+1}^{-1} / D_n^1
    let lhs = sum_over(k + 1, n - 1, &|l| Ok(sq(d(l + 1, 0)?)))?;
    let rhs = d(k + 2, -1)?.div(&denom(k + 1)?).sub(&d(n + 1, -1)?.div(&denom(n)?));
    entries.push(entry("sums.1", k, 0, lhs.sub(&rhs)));

    // 2: Σ (D_{l+1}^0 D_l^2) / (..) = G_n^0 / D_n^1 - G_{k+1}^0 / D_{k+1}^1
    let lhs = sum_over(k + 1, n - 1, &|l| Ok(d(l + 1, 0)?.mul(&d(l, 2)?)))?;
    let rhs = g(n, 0)?.div(&denom(n)?).sub(&g(k + 1, 0)?.div(&denom(k + 1)?));
    entries.push(entry("sums.2", k, 0, lhs.sub(&rhs)));

    // 3: Σ (D_l^2)^2 / (..) = D_{n-1}^3 / D_n^1 - D_k^3 / D_{k+1}^1
    let lhs = sum_over(k + 1, n - 1, &|l| Ok(sq(d(l, 2)?)))?;
    let rhs = d(n - 1, 3)?.div(&denom(n)?).sub(&d(k, 3)?.div(&denom(k + 1)?));
    entries.push(entry("sums.3", k, 0, lhs.sub(&rhs)));

    // 4: Σ_{l=0}^{k} (D_l^2)^2 / (..) = D_k^3 / D_{k+1}^1
    let lhs = sum_over(0, k, &|l| Ok(sq(d(l, 2)?)))?;
    let rhs = d(k, 3)?.div(&denom(k + 1)?);
    entries.push(entry("sums.4", k, 0, lhs.sub(&rhs)));

    Ok(ResidualReport { entries })
}

/// Two multi-term combinations of the bilinear identities, valid for any
/// element sequence and `k >= 0`. The first is stated with a
/// `1 / delta(k+1, 1)` factor; both sides here are multiplied through by that
/// determinant so the residual stays division-free (and meaningful even where
/// it vanishes).
pub fn check_combined<S: ElementSeq>(
    tbl: &HankelTable<S>,
    k: i64,
) -> Result<ResidualReport<S::Elem>, HankelError>
where
    S::Elem: Scalar,
{
    assert!(k >= 0, "stated for k >= 0");
    let d = |kk: i64, ll: i64| tbl.delta(kk, ll);
    let g = |kk: i64, ll: i64| tbl.gee(kk, ll);
    let two = S::Elem::from_int(2);
    let four = S::Elem::from_int(4);
    let sq = |x: &S::Elem| x.mul(x);
    let mut entries = Vec::new();

    // (G_{k+1}^{-1} + G_k^1) D_k^2 - G_k^1 D_{k+1}^0
    //   = (D_k^2)^2 (D_{k+2}^{-1} + G_{k+1}^0) / D_{k+1}^1
    //     + ((D_{k+1}^0)^2 - D_{k+1}^0 D_k^2) D_k^3 / D_{k+1}^1
    let lhs = g(k + 1, -1)?
        .add(&g(k, 1)?)
        .mul(&d(k, 2)?)
        .sub(&g(k, 1)?.mul(&d(k + 1, 0)?))
        .mul(&d(k + 1, 1)?);
    let rhs = sq(&d(k, 2)?)
        .mul(&d(k + 2, -1)?.add(&g(k + 1, 0)?))
        .add(&sq(&d(k + 1, 0)?).sub(&d(k + 1, 0)?.mul(&d(k, 2)?)).mul(&d(k, 3)?));
    entries.push(entry("combined.1", k, 0, lhs.sub(&rhs)));

    // 2 D_{k+1}^1 D_k^1 (2 G_{k+1}^{-1} + 2 G_k^1)
    //   - D_{k+1}^0 [ (2 G_{k+1}^0 - D_k^3) D_k^1 + D_{k+1}^1 (2 G_k^0 - D_{k-1}^3) ]
    // = D_k^1 D_k^2 (4 D_{k+2}^{-1} + 4 G_{k+1}^0 - D_k^3)
    //   - D_{k+1}^1 D_{k-1}^3 (2 D_{k+1}^0 - D_k^2)
    //   + (D_{k+1}^0 - D_k^2) (2 D_{k+1}^0 D_k^2 - (D_k^2)^2)
    let lhs = two
        .mul(&d(k + 1, 1)?)
        .mul(&d(k, 1)?)
        .mul(&two.mul(&g(k + 1, -1)?).add(&two.mul(&g(k, 1)?)))
        .sub(&d(k + 1, 0)?.mul(&{
            let part1 = two.mul(&g(k + 1, 0)?).sub(&d(k, 3)?).mul(&d(k, 1)?);
            let part2 = d(k + 1, 1)?.mul(&two.mul(&g(k, 0)?).sub(&d(k - 1, 3)?));
            part1.add(&part2)
        }));
    let rhs = d(k, 1)?
        .mul(&d(k, 2)?)
        .mul(&four.mul(&d(k + 2, -1)?).add(&four.mul(&g(k + 1, 0)?)).sub(&d(k, 3)?))
        .sub(&d(k + 1, 1)?.mul(&d(k - 1, 3)?).mul(&two.mul(&d(k + 1, 0)?).sub(&d(k, 2)?)))
        .add(&d(k + 1, 0)?.sub(&d(k, 2)?).mul(&{
            let t = two.mul(&d(k + 1, 0)?).mul(&d(k, 2)?);
            t.sub(&sq(&d(k, 2)?))
        }));
    entries.push(entry("combined.2", k, 0, lhs.sub(&rhs)));

    Ok(ResidualReport { entries })
}

/// Time-derivative law of the Hankel determinants over polynomial moments,
/// as an exact polynomial residual (must be identically zero):
///
/// * `l = 0`:  `dD_k^0/dt = (r + 2s) G_k^{-1} + (2r + 2s) G_{k-1}^1`
/// * `l = 1`:  `dD_k^1/dt = (2r + 2s) G_k^0 - (r + s) D_{k-1}^3`
/// * `l >= 2`: `dD_k^l/dt = [r(l+1) + 2s] G_k^{l-1}`
pub fn check_delta_derivatives(
    sys: &MomentSystem<Rational>,
    k: i64,
    l: i64,
) -> Result<ResidualReport<DensePolynomial<Rational>>, HankelError> {
    assert!(k >= 0 && l >= 0, "stated for k >= 0, l >= 0");
    let (r, s) = (&sys.params().r, &sys.params().s);
    let tbl = HankelTable::new(PolyMomentSeq::new(sys));
    let lhs = tbl.delta(k, l)?.derivative();
    let (name, rhs): (&'static str, DensePolynomial<Rational>) = match l {
        0 => {
            let c1 = r.add(&s.mul(&Rational::from(2)));
            let c2 = r.add(s).mul(&Rational::from(2));
            (
                "derivative.shift0",
                tbl.gee(k, -1)?.scale(&c1).add(&tbl.gee(k - 1, 1)?.scale(&c2)),
            )
        }
        1 => {
            let c1 = r.add(s).mul(&Rational::from(2));
            let c2 = r.add(s);
            (
                "derivative.shift1",
                tbl.gee(k, 0)?.scale(&c1).sub(&tbl.delta(k - 1, 3)?.scale(&c2)),
            )
        }
        _ => {
            let c = r.mul(&Rational::from(l + 1)).add(&s.mul(&Rational::from(2)));
            ("derivative.shiftn", tbl.gee(k, l - 1)?.scale(&c))
        }
    };
    Ok(ResidualReport {
        entries: vec![entry(name, k, l, lhs.sub(&rhs))],
    })
}

/// Float counterpart of [`check_delta_derivatives`] at a single time, using
/// the analytic moment derivatives and the column-wise differential rule.
pub fn check_delta_derivatives_f64(
    sys: &MomentSystem<f64>,
    k: i64,
    l: i64,
    t: f64,
) -> Result<ResidualReport<f64>, HankelError> {
    assert!(k >= 0 && l >= 0, "stated for k >= 0, l >= 0");
    let (r, s) = (sys.params().r, sys.params().s);
    let tbl = HankelTable::new(MomentSeq::new(sys, t));

    // d/dt det(A_{i+j+l}) = Σ_c det(matrix with column c differentiated)
    let mut lhs = 0.0;
    let n = k.max(0) as usize;
    for c in 0..n {
        let mut rows = Vec::with_capacity(n);
        for i in 0..n {
            let mut row = Vec::with_capacity(n);
            for j in 0..n {
                let idx = i as i64 + j as i64 + l;
                row.push(if j == c {
                    sys.moment_derivative(idx, t)?
                } else {
                    sys.moment(idx, t)?
                });
            }
            rows.push(row);
        }
        lhs += det(&Matrix::from_rows(rows));
    }

    let (name, rhs) = match l {
        0 => (
            "derivative.shift0",
            (r + 2.0 * s) * tbl.gee(k, -1)? + (2.0 * r + 2.0 * s) * tbl.gee(k - 1, 1)?,
        ),
        1 => (
            "derivative.shift1",
            (2.0 * r + 2.0 * s) * tbl.gee(k, 0)? - (r + s) * tbl.delta(k - 1, 3)?,
        ),
        _ => (
            "derivative.shiftn",
            (r * (l + 1) as f64 + 2.0 * s) * tbl.gee(k, l - 1)?,
        ),
    };
    Ok(ResidualReport {
        entries: vec![entry(name, k, l, lhs - rhs)],
    })
}
