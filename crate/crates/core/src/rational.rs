//! Exact arithmetic on P¹(Q): cusps, integer matrices, continued fractions,
//! primitive (Farey) segments and primitive chains.
//!
//! All values here are built on `BigInt` and never round. Floating point
//! only appears in [`IntegerMatrix2::to_f64`], which the analytic layers use
//! to move points around the complex plane.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// A point of P¹(Q), stored as a reduced pair `(p, q)` with `q ≥ 0`.
///
/// The point at infinity is `(1, 0)`; −∞ and +∞ are the same cusp.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Cusp {
    p: BigInt,
    q: BigInt,
}

impl Cusp {
    pub fn new(p: impl Into<BigInt>, q: impl Into<BigInt>) -> Result<Self> {
        let (mut p, mut q) = (p.into(), q.into());
        if p.is_zero() && q.is_zero() {
            return Err(Error::ZeroCusp);
        }
        if q.is_zero() {
            return Ok(Self::infinity());
        }
        if q.is_negative() {
            p = -p;
            q = -q;
        }
        let g = p.gcd(&q);
        Ok(Cusp { p: p / &g, q: q / &g })
    }

    pub fn infinity() -> Self {
        Cusp {
            p: BigInt::one(),
            q: BigInt::zero(),
        }
    }

    pub fn zero() -> Self {
        Cusp {
            p: BigInt::zero(),
            q: BigInt::one(),
        }
    }

    pub fn integer(n: impl Into<BigInt>) -> Self {
        Cusp {
            p: n.into(),
            q: BigInt::one(),
        }
    }

    pub fn from_ratio(r: &BigRational) -> Self {
        // BigRational is already reduced with a positive denominator.
        Cusp {
            p: r.numer().clone(),
            q: r.denom().clone(),
        }
    }

    pub fn p(&self) -> &BigInt {
        &self.p
    }

    pub fn q(&self) -> &BigInt {
        &self.q
    }

    pub fn is_infinite(&self) -> bool {
        self.q.is_zero()
    }

    pub fn to_ratio(&self) -> Option<BigRational> {
        if self.is_infinite() {
            None
        } else {
            Some(BigRational::new(self.p.clone(), self.q.clone()))
        }
    }

    /// Real value, reading ∞ as −∞ (the left-half convention).
    pub fn to_f64(&self) -> f64 {
        if self.is_infinite() {
            f64::NEG_INFINITY
        } else {
            ratio_to_f64(&self.p, &self.q)
        }
    }

    /// True for ∞ and for every rational ≤ 0.
    pub fn is_left(&self) -> bool {
        self.is_infinite() || !self.p.is_positive()
    }

    /// Ordering on the left line [−∞, +∞), with ∞ read as −∞.
    pub fn cmp_left(&self, other: &Cusp) -> Ordering {
        match (self.is_infinite(), other.is_infinite()) {
            (true, true) => Ordering::Equal,
            (true, false) => Ordering::Less,
            (false, true) => Ordering::Greater,
            (false, false) => (&self.p * &other.q).cmp(&(&other.p * &self.q)),
        }
    }

    /// Representative `(p, q)` in which ∞ is written as `(−1, 0)`, so that
    /// Farey mediants of left cusps come out with the right sign.
    fn left_pair(&self) -> (BigInt, BigInt) {
        if self.is_infinite() {
            (-BigInt::one(), BigInt::zero())
        } else {
            (self.p.clone(), self.q.clone())
        }
    }

    /// Farey mediant `(p₁+p₂)/(q₁+q₂)`, with ∞ taken as −1/0.
    pub fn mediant(&self, other: &Cusp) -> Cusp {
        let (p1, q1) = self.left_pair();
        let (p2, q2) = other.left_pair();
        Cusp::new(p1 + p2, q1 + q2).expect("mediant of distinct cusps is nonzero")
    }
}

impl fmt::Display for Cusp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

impl FromStr for Cusp {
    type Err = Error;

    /// Accepts `p/q`, an integer, `1/0`, or one of `inf`, `-inf`, `∞`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if matches!(t, "inf" | "-inf" | "+inf" | "∞" | "-∞" | "infinity" | "-infinity") {
            return Ok(Cusp::infinity());
        }
        let (p, q) = parse_pair(s)?;
        Cusp::new(p, q).map_err(|_| Error::Parse {
            input: s.to_string(),
            position: 0,
            reason: "0/0 is not a cusp".into(),
        })
    }
}

fn ratio_to_f64(p: &BigInt, q: &BigInt) -> f64 {
    match (p.to_f64(), q.to_f64()) {
        (Some(a), Some(b)) if a.is_finite() && b.is_finite() && b != 0.0 => a / b,
        _ => BigRational::new(p.clone(), q.clone()).to_f64().unwrap_or(f64::NAN),
    }
}

fn parse_pair(s: &str) -> Result<(BigInt, BigInt)> {
    let err = |position: usize, reason: &str| Error::Parse {
        input: s.to_string(),
        position,
        reason: reason.to_string(),
    };
    let lead = s.len() - s.trim_start().len();
    let t = s.trim();
    if t.is_empty() {
        return Err(err(0, "empty input"));
    }
    let (num, den, den_at) = match t.find('/') {
        Some(i) => (&t[..i], &t[i + 1..], lead + i + 1),
        None => (t, "1", lead + t.len()),
    };
    let check = |part: &str, offset: usize| -> Result<BigInt> {
        if part.is_empty() {
            return Err(err(offset, "missing integer"));
        }
        for (i, ch) in part.char_indices() {
            let sign_ok = i == 0 && (ch == '-' || ch == '+') && part.len() > 1;
            if !ch.is_ascii_digit() && !sign_ok {
                return Err(err(offset + i, &format!("unexpected character {ch:?}")));
            }
        }
        BigInt::from_str(part).map_err(|e| err(offset, &e.to_string()))
    };
    let p = check(num, lead)?;
    let q = check(den, den_at)?;
    Ok((p, q))
}

/// Parse `p/q` (or an integer) into a reduced rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let (p, q) = parse_pair(s)?;
    if q.is_zero() {
        let position = s.find('/').map(|i| i + 1).unwrap_or(0);
        return Err(Error::Parse {
            input: s.to_string(),
            position,
            reason: "zero denominator".into(),
        });
    }
    Ok(BigRational::new(p, q))
}

/// A 2×2 integer matrix `(a, b; c, d)` with nonzero determinant.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntegerMatrix2 {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
    pub d: BigInt,
}

impl IntegerMatrix2 {
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>, c: impl Into<BigInt>, d: impl Into<BigInt>) -> Result<Self> {
        let m = IntegerMatrix2 {
            a: a.into(),
            b: b.into(),
            c: c.into(),
            d: d.into(),
        };
        if m.det().is_zero() {
            Err(Error::SingularMatrix)
        } else {
            Ok(m)
        }
    }

    /// Shorthand for literals known to be nonsingular.
    pub fn from_i64(a: i64, b: i64, c: i64, d: i64) -> Self {
        Self::new(a, b, c, d).expect("nonsingular literal matrix")
    }

    pub fn identity() -> Self {
        Self::from_i64(1, 0, 0, 1)
    }

    /// `T = (1,1;0,1)`.
    pub fn t() -> Self {
        Self::from_i64(1, 1, 0, 1)
    }

    /// `T′ = (1,0;1,1)`.
    pub fn t_prime() -> Self {
        Self::from_i64(1, 0, 1, 1)
    }

    pub fn det(&self) -> BigInt {
        &self.a * &self.d - &self.b * &self.c
    }

    /// det = 1 and all entries ≥ 0.
    pub fn in_s(&self) -> bool {
        self.det().is_one()
            && !self.a.is_negative()
            && !self.b.is_negative()
            && !self.c.is_negative()
            && !self.d.is_negative()
    }

    /// c > 0, or c = 0 with a, d > 0.
    pub fn in_g(&self) -> bool {
        self.c.is_positive() || (self.c.is_zero() && self.a.is_positive() && self.d.is_positive())
    }

    pub fn in_g_plus(&self) -> bool {
        self.in_g()
            && !self.b.is_negative()
            && !self.d.is_negative()
            && (self.a.is_positive() || (self.a.is_zero() && self.b.is_positive()))
    }

    /// Adjugate `(d,−b;−c,a)`; acts on P¹ as the inverse.
    pub fn adjugate(&self) -> Self {
        IntegerMatrix2 {
            a: self.d.clone(),
            b: -&self.b,
            c: -&self.c,
            d: self.a.clone(),
        }
    }

    /// Exact inverse of a determinant ±1 matrix.
    pub fn inverse_unimodular(&self) -> Option<Self> {
        let det = self.det();
        if det.is_one() {
            Some(self.adjugate())
        } else if (-&det).is_one() {
            let adj = self.adjugate();
            Some(IntegerMatrix2 {
                a: -adj.a,
                b: -adj.b,
                c: -adj.c,
                d: -adj.d,
            })
        } else {
            None
        }
    }

    /// Möbius action on a cusp.
    pub fn apply(&self, x: &Cusp) -> Cusp {
        let num = &self.a * &x.p + &self.b * &x.q;
        let den = &self.c * &x.p + &self.d * &x.q;
        Cusp::new(num, den).expect("nonsingular matrix maps cusps to cusps")
    }

    pub fn to_f64(&self) -> [f64; 4] {
        let f = |x: &BigInt| x.to_f64().unwrap_or(f64::NAN);
        [f(&self.a), f(&self.b), f(&self.c), f(&self.d)]
    }

    pub fn rows(&self) -> [[BigInt; 2]; 2] {
        [[self.a.clone(), self.b.clone()], [self.c.clone(), self.d.clone()]]
    }
}

impl std::ops::Mul for &IntegerMatrix2 {
    type Output = IntegerMatrix2;

    fn mul(self, o: &IntegerMatrix2) -> IntegerMatrix2 {
        IntegerMatrix2 {
            a: &self.a * &o.a + &self.b * &o.c,
            b: &self.a * &o.b + &self.b * &o.d,
            c: &self.c * &o.a + &self.d * &o.c,
            d: &self.c * &o.b + &self.d * &o.d,
        }
    }
}

impl fmt::Display for IntegerMatrix2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{};{},{})", self.a, self.b, self.c, self.d)
    }
}

/// An ordered pair of cusps.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OrientedSegment {
    pub start: Cusp,
    pub end: Cusp,
}

impl OrientedSegment {
    pub fn new(start: Cusp, end: Cusp) -> Self {
        OrientedSegment { start, end }
    }

    pub fn reversed(&self) -> Self {
        OrientedSegment {
            start: self.end.clone(),
            end: self.start.clone(),
        }
    }

    pub fn is_improper(&self) -> bool {
        self.start == self.end
    }

    /// Both ends in [−∞, 0].
    pub fn is_left(&self) -> bool {
        self.start.is_left() && self.end.is_left()
    }

    pub fn is_left_primitive(&self) -> bool {
        matrix_from_segment(self).is_ok()
    }
}

impl fmt::Display for OrientedSegment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.start, self.end)
    }
}

/// `g ↦ (g⁻¹(−∞), g⁻¹(0)) = (−d/c, −b/a)`.
pub fn segment_from_matrix(g: &IntegerMatrix2) -> Result<OrientedSegment> {
    if !g.in_s() {
        return Err(Error::NotInS(g.to_string()));
    }
    let start = Cusp::new(-&g.d, g.c.clone())?;
    let end = Cusp::new(-&g.b, g.a.clone())?;
    Ok(OrientedSegment { start, end })
}

/// Inverse of [`segment_from_matrix`].
pub fn matrix_from_segment(seg: &OrientedSegment) -> Result<IntegerMatrix2> {
    let bad = || Error::NotPrimitive(seg.to_string());
    if !seg.is_left() || seg.end.is_infinite() || seg.start.cmp_left(&seg.end) != Ordering::Less {
        return Err(bad());
    }
    let (p2, q2) = (&seg.end.p, &seg.end.q);
    let g = if seg.start.is_infinite() {
        if !q2.is_one() {
            return Err(bad());
        }
        IntegerMatrix2 {
            a: BigInt::one(),
            b: -p2,
            c: BigInt::zero(),
            d: BigInt::one(),
        }
    } else {
        let (p1, q1) = (&seg.start.p, &seg.start.q);
        IntegerMatrix2 {
            a: q2.clone(),
            b: -p2,
            c: q1.clone(),
            d: -p1,
        }
    };
    if g.in_s() {
        Ok(g)
    } else {
        Err(bad())
    }
}

/// Split a left primitive segment at the Farey mediant of its ends.
///
/// If the parent has matrix `g`, the halves have matrices `Tg` and `T′g`.
pub fn mediant_split(seg: &OrientedSegment) -> Result<(OrientedSegment, OrientedSegment)> {
    let g = matrix_from_segment(seg)?;
    let first = segment_from_matrix(&(&IntegerMatrix2::t() * &g))?;
    let second = segment_from_matrix(&(&IntegerMatrix2::t_prime() * &g))?;
    Ok((first, second))
}

/// Euclidean continued fraction of a rational in [0, 1).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContinuedFractionExpansion {
    pub target: BigRational,
    /// Partial quotients `a₁..aₙ`; the last one is ≥ 2 whenever n ≥ 1.
    pub quotients: Vec<BigInt>,
    /// `1/0, 0/1, b₁/d₁, …, bₙ/dₙ`.
    pub convergents: Vec<Cusp>,
}

impl ContinuedFractionExpansion {
    pub fn len(&self) -> usize {
        self.quotients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.quotients.is_empty()
    }
}

pub fn continued_fraction(x: &BigRational) -> Result<ContinuedFractionExpansion> {
    if x.is_negative() || *x >= BigRational::one() {
        return Err(Error::NotInUnitInterval(x.to_string()));
    }
    let (quotients, pairs) = expansion_with_integer_part(x);
    let convergents = pairs
        .into_iter()
        .map(|(b, d)| Cusp::new(b, d).expect("convergents are nonzero"))
        .collect();
    Ok(ContinuedFractionExpansion {
        target: x.clone(),
        quotients: quotients[1..].to_vec(),
        convergents,
    })
}

/// Expansion `x = [a₀; a₁, …, aₙ]` of a nonnegative rational, returning the
/// quotients (with `a₀` first) and the convergent pairs starting at `1/0`.
fn expansion_with_integer_part(x: &BigRational) -> (Vec<BigInt>, Vec<(BigInt, BigInt)>) {
    let (mut num, mut den) = (x.numer().clone(), x.denom().clone());
    let mut quotients = Vec::new();
    loop {
        let (a, r) = num.div_rem(&den);
        quotients.push(a);
        if r.is_zero() {
            break;
        }
        num = den;
        den = r;
    }
    let mut pairs = vec![(BigInt::one(), BigInt::zero())];
    let (mut b2, mut d2) = (BigInt::zero(), BigInt::one());
    let (mut b1, mut d1) = (BigInt::one(), BigInt::zero());
    for a in &quotients {
        let b = a * &b1 + &b2;
        let d = a * &d1 + &d2;
        b2 = std::mem::replace(&mut b1, b.clone());
        d2 = std::mem::replace(&mut d1, d.clone());
        pairs.push((b, d));
    }
    (quotients, pairs)
}

/// One signed step of a primitive chain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainStep {
    pub sign: i8,
    pub matrix: IntegerMatrix2,
}

impl ChainStep {
    /// The segment actually traversed (reversed when the sign is −1).
    pub fn signed_segment(&self) -> OrientedSegment {
        let seg = segment_from_matrix(&self.matrix).expect("chain matrices are in S");
        if self.sign < 0 {
            seg.reversed()
        } else {
            seg
        }
    }
}

/// A finite sequence of signed primitive segments from `alpha` to `beta`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimitiveChain {
    pub alpha: Cusp,
    pub beta: Cusp,
    pub steps: Vec<ChainStep>,
}

impl PrimitiveChain {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn signed_segments(&self) -> Vec<OrientedSegment> {
        self.steps.iter().map(ChainStep::signed_segment).collect()
    }

    /// Exact check that the signed segments add up to the indicator of
    /// `(alpha, beta)`: every elementary interval between breakpoints must be
    /// covered with multiplicity one inside and zero outside.
    pub fn tiles_exactly(&self) -> bool {
        if !self.steps.iter().all(|s| s.matrix.in_s()) {
            return false;
        }
        let segs: Vec<(i64, Cusp, Cusp)> = self
            .steps
            .iter()
            .map(|s| {
                let seg = segment_from_matrix(&s.matrix).expect("in S");
                (s.sign as i64, seg.start, seg.end)
            })
            .collect();
        let mut points: Vec<Cusp> = vec![self.alpha.clone(), self.beta.clone()];
        for (_, a, b) in &segs {
            points.push(a.clone());
            points.push(b.clone());
        }
        points.sort_by(|x, y| x.cmp_left(y));
        points.dedup();
        let (lo, hi, target_sign) = match self.alpha.cmp_left(&self.beta) {
            Ordering::Less => (&self.alpha, &self.beta, 1),
            Ordering::Greater => (&self.beta, &self.alpha, -1),
            Ordering::Equal => (&self.alpha, &self.beta, 0),
        };
        for w in points.windows(2) {
            let (x, y) = (&w[0], &w[1]);
            let mut count = 0i64;
            for (sign, a, b) in &segs {
                if a.cmp_left(x) != Ordering::Greater && b.cmp_left(y) != Ordering::Less {
                    count += sign;
                }
            }
            let inside = lo.cmp_left(x) != Ordering::Greater && hi.cmp_left(y) != Ordering::Less;
            let want = if inside { target_sign } else { 0 };
            if count != want {
                return false;
            }
        }
        true
    }

    /// Replace step `index` by the two halves of its mediant split, keeping
    /// the direction of travel.
    pub fn refine(&self, index: usize) -> PrimitiveChain {
        let step = &self.steps[index];
        let first = ChainStep {
            sign: step.sign,
            matrix: &IntegerMatrix2::t() * &step.matrix,
        };
        let second = ChainStep {
            sign: step.sign,
            matrix: &IntegerMatrix2::t_prime() * &step.matrix,
        };
        let mut steps = self.steps[..index].to_vec();
        if step.sign > 0 {
            steps.push(first);
            steps.push(second);
        } else {
            steps.push(second);
            steps.push(first);
        }
        steps.extend_from_slice(&self.steps[index + 1..]);
        PrimitiveChain {
            alpha: self.alpha.clone(),
            beta: self.beta.clone(),
            steps,
        }
    }
}

/// The continued-fraction chain from −∞ to a left cusp `beta`.
///
/// With normalized convergents `bₖ/dₖ` of |β| the k-th step is
/// `((−1)ᵏ, (d_{k−ε(k+1)}, b_{k−ε(k+1)}; d_{k−ε(k)}, b_{k−ε(k)}))` where
/// ε(k) is 1 for even k and 0 for odd k. For |β| ≥ 1 the integer part is the
/// zeroth quotient, and an integer |β| = a is expanded as `[a−1; 1]`.
pub fn primitive_chain_to(beta: &Cusp) -> Result<PrimitiveChain> {
    if !beta.is_left() {
        return Err(Error::NotLeftCusp(beta.to_string()));
    }
    let alpha = Cusp::infinity();
    if beta.is_infinite() {
        return Ok(PrimitiveChain {
            alpha,
            beta: beta.clone(),
            steps: vec![],
        });
    }
    let x = BigRational::new(-beta.p.clone(), beta.q.clone());
    let (mut quotients, _) = expansion_with_integer_part(&x);
    if quotients.len() == 1 && !quotients[0].is_zero() {
        let a = quotients[0].clone();
        quotients = vec![a - 1u32, BigInt::one()];
    }
    let mut conv: Vec<(BigInt, BigInt)> = vec![(BigInt::one(), BigInt::zero())];
    let (mut b2, mut d2) = (BigInt::zero(), BigInt::one());
    let (mut b1, mut d1) = (BigInt::one(), BigInt::zero());
    for a in &quotients {
        let b = a * &b1 + &b2;
        let d = a * &d1 + &d2;
        b2 = std::mem::replace(&mut b1, b.clone());
        d2 = std::mem::replace(&mut d1, d.clone());
        conv.push((b, d));
    }
    // conv[j + 1] holds the convergent with index j (j = −1, 0, …, n).
    let n = quotients.len() - 1;
    let eps = |k: usize| -> usize {
        if k.is_multiple_of(2) {
            1
        } else {
            0
        }
    };
    let mut steps = Vec::with_capacity(n + 1);
    for k in 0..=n {
        // Index k − ε is at least −1, so shift by one into `conv`.
        let (top_b, top_d) = &conv[k + 1 - eps(k + 1)];
        let (bot_b, bot_d) = &conv[k + 1 - eps(k)];
        let matrix = IntegerMatrix2 {
            a: top_d.clone(),
            b: top_b.clone(),
            c: bot_d.clone(),
            d: bot_b.clone(),
        };
        if !matrix.in_s() {
            return Err(Error::NotInS(matrix.to_string()));
        }
        let sign = if k % 2 == 0 { 1 } else { -1 };
        steps.push(ChainStep { sign, matrix });
    }
    Ok(PrimitiveChain {
        alpha,
        beta: beta.clone(),
        steps,
    })
}

/// The increasing Farey chain −∞ = α₀ < α₁ < … < αₙ = β, every step with
/// sign +1.
///
/// It follows the Stern–Brocot descent towards β from the left. Because all
/// steps end at or before β, each term is holomorphic off (−∞, β], which is
/// what evaluation at points with real part in (β, 0] needs.
pub fn monotone_chain_to(beta: &Cusp) -> Result<PrimitiveChain> {
    if !beta.is_left() {
        return Err(Error::NotLeftCusp(beta.to_string()));
    }
    let alpha = Cusp::infinity();
    let mut steps = Vec::new();
    if beta.is_infinite() {
        return Ok(PrimitiveChain {
            alpha,
            beta: beta.clone(),
            steps,
        });
    }
    let push = |steps: &mut Vec<ChainStep>, a: &Cusp, b: &Cusp| -> Result<()> {
        let g = matrix_from_segment(&OrientedSegment::new(a.clone(), b.clone()))?;
        steps.push(ChainStep { sign: 1, matrix: g });
        Ok(())
    };
    // First step: −∞ to the integer ⌊β⌋ (β ≤ 0 so this is −⌈|β|⌉).
    let floor = beta.p.div_floor(&beta.q);
    let mut left = Cusp::integer(floor.clone());
    push(&mut steps, &Cusp::infinity(), &left)?;
    let mut right = Cusp::integer(floor + 1u32);
    while left != *beta {
        let med = left.mediant(&right);
        if med.cmp_left(beta) != Ordering::Greater {
            push(&mut steps, &left, &med)?;
            left = med;
        } else {
            right = med;
        }
    }
    Ok(PrimitiveChain {
        alpha,
        beta: beta.clone(),
        steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cusp(p: i64, q: i64) -> Cusp {
        Cusp::new(p, q).unwrap()
    }

    fn m(a: i64, b: i64, c: i64, d: i64) -> IntegerMatrix2 {
        IntegerMatrix2::from_i64(a, b, c, d)
    }

    #[test]
    fn cusp_normalization() {
        assert_eq!(cusp(2, -4), cusp(-1, 2));
        assert_eq!(cusp(-5, 0), Cusp::infinity());
        assert!(Cusp::new(0, 0).is_err());
        assert_eq!(cusp(0, 7), Cusp::zero());
    }

    #[test]
    fn mobius_examples() {
        assert_eq!(IntegerMatrix2::identity().apply(&cusp(-3, 7)), cusp(-3, 7));
        assert_eq!(IntegerMatrix2::t().apply(&Cusp::infinity()), Cusp::infinity());
        assert_eq!(m(1, 0, 2, 1).apply(&cusp(-1, 2)), Cusp::infinity());
    }

    #[test]
    fn segment_examples() {
        let s = segment_from_matrix(&IntegerMatrix2::identity()).unwrap();
        assert_eq!(s, OrientedSegment::new(Cusp::infinity(), Cusp::zero()));
        let s = segment_from_matrix(&IntegerMatrix2::t()).unwrap();
        assert_eq!(s, OrientedSegment::new(Cusp::infinity(), cusp(-1, 1)));
        let s = segment_from_matrix(&IntegerMatrix2::t_prime()).unwrap();
        assert_eq!(s, OrientedSegment::new(cusp(-1, 1), Cusp::zero()));
        assert!(segment_from_matrix(&m(2, 1, 1, 1)).is_ok());
        assert!(segment_from_matrix(&m(1, -1, 0, 1)).is_err());
    }

    #[test]
    fn matrix_examples() {
        let seg = OrientedSegment::new(cusp(-1, 2), cusp(-3, 7));
        assert_eq!(matrix_from_segment(&seg).unwrap(), m(7, 3, 2, 1));
        let seg = OrientedSegment::new(cusp(-1, 3), Cusp::zero());
        assert_eq!(matrix_from_segment(&seg).unwrap(), m(1, 0, 3, 1));
        let seg = OrientedSegment::new(Cusp::infinity(), Cusp::zero());
        assert_eq!(matrix_from_segment(&seg).unwrap(), IntegerMatrix2::identity());
        // Not Farey neighbours.
        let seg = OrientedSegment::new(cusp(-1, 1), cusp(-1, 3));
        assert!(matches!(matrix_from_segment(&seg), Err(Error::NotPrimitive(_))));
        // Wrong orientation.
        let seg = OrientedSegment::new(Cusp::zero(), cusp(-1, 1));
        assert!(matrix_from_segment(&seg).is_err());
    }

    #[test]
    fn continued_fraction_examples() {
        let cf = continued_fraction(&BigRational::new(3.into(), 7.into())).unwrap();
        assert_eq!(cf.quotients, vec![BigInt::from(2), BigInt::from(3)]);
        assert_eq!(
            cf.convergents,
            vec![Cusp::infinity(), Cusp::zero(), cusp(1, 2), cusp(3, 7)]
        );
        let cf = continued_fraction(&BigRational::zero()).unwrap();
        assert!(cf.quotients.is_empty());
        assert_eq!(cf.convergents, vec![Cusp::infinity(), Cusp::zero()]);
        let cf = continued_fraction(&BigRational::new(1.into(), 2.into())).unwrap();
        assert_eq!(cf.quotients, vec![BigInt::from(2)]);
        assert!(continued_fraction(&BigRational::new(7.into(), 3.into())).is_err());
    }

    #[test]
    fn chain_examples() {
        let c = primitive_chain_to(&Cusp::zero()).unwrap();
        assert_eq!(
            c.steps,
            vec![ChainStep {
                sign: 1,
                matrix: IntegerMatrix2::identity()
            }]
        );

        let c = primitive_chain_to(&cusp(-3, 7)).unwrap();
        let got: Vec<(i8, IntegerMatrix2)> = c.steps.iter().map(|s| (s.sign, s.matrix.clone())).collect();
        assert_eq!(
            got,
            vec![(1, IntegerMatrix2::identity()), (-1, m(1, 0, 2, 1)), (1, m(7, 3, 2, 1))]
        );
        assert!(c.tiles_exactly());

        let c = primitive_chain_to(&cusp(-1, 1)).unwrap();
        let got: Vec<(i8, IntegerMatrix2)> = c.steps.iter().map(|s| (s.sign, s.matrix.clone())).collect();
        assert_eq!(got, vec![(1, IntegerMatrix2::identity()), (-1, m(1, 0, 1, 1))]);

        assert!(primitive_chain_to(&cusp(1, 2)).is_err());
    }

    #[test]
    fn chains_beyond_minus_one() {
        for (p, q) in [(-2, 1), (-7, 3), (-13, 5), (-100, 1), (-101, 10)] {
            let c = primitive_chain_to(&cusp(p, q)).unwrap();
            assert!(c.tiles_exactly(), "{p}/{q}");
            let c = monotone_chain_to(&cusp(p, q)).unwrap();
            assert!(c.tiles_exactly(), "{p}/{q}");
        }
    }

    #[test]
    fn monotone_chain_example() {
        let c = monotone_chain_to(&cusp(-3, 7)).unwrap();
        let ends: Vec<Cusp> = c.signed_segments().into_iter().map(|s| s.end).collect();
        assert_eq!(ends, vec![cusp(-1, 1), cusp(-1, 2), cusp(-3, 7)]);
        assert!(c.tiles_exactly());
    }

    #[test]
    fn mediant_examples() {
        let (a, b) = mediant_split(&OrientedSegment::new(Cusp::infinity(), Cusp::zero())).unwrap();
        assert_eq!(a, OrientedSegment::new(Cusp::infinity(), cusp(-1, 1)));
        assert_eq!(b, OrientedSegment::new(cusp(-1, 1), Cusp::zero()));
        let (a, b) = mediant_split(&OrientedSegment::new(cusp(-1, 2), cusp(-1, 3))).unwrap();
        assert_eq!(a, OrientedSegment::new(cusp(-1, 2), cusp(-2, 5)));
        assert_eq!(b, OrientedSegment::new(cusp(-2, 5), cusp(-1, 3)));
        let (a, b) = mediant_split(&OrientedSegment::new(cusp(-1, 1), Cusp::zero())).unwrap();
        assert_eq!(a, OrientedSegment::new(cusp(-1, 1), cusp(-1, 2)));
        assert_eq!(b, OrientedSegment::new(cusp(-1, 2), Cusp::zero()));
    }

    #[test]
    fn refinement_keeps_tiling() {
        let c = primitive_chain_to(&cusp(-3, 7)).unwrap();
        for i in 0..c.len() {
            assert!(c.refine(i).tiles_exactly());
        }
    }

    #[test]
    fn parse_errors_carry_position() {
        match parse_rational("3/x7") {
            Err(Error::Parse { position, .. }) => assert_eq!(position, 2),
            other => panic!("{other:?}"),
        }
        assert!(parse_rational("1/0").is_err());
        assert_eq!(
            parse_rational(" -6/4 ").unwrap(),
            BigRational::new((-3).into(), 2.into())
        );
        assert_eq!("inf".parse::<Cusp>().unwrap(), Cusp::infinity());
        assert_eq!("-3/7".parse::<Cusp>().unwrap(), cusp(-3, 7));
    }
}
