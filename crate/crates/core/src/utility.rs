//! Exact affine payoffs in a step counter and the preference orders over them.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn rat_frac(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_k(k: u64) -> Rational {
    Rational::from_integer(BigInt::from(k))
}

/// Formats a rational as `n` or `n/d`.
pub fn fmt_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Direction of the total preorder on utility values.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Preference {
    /// Payoffs: larger is better.
    Max,
    /// Costs: smaller is better.
    Min,
}

impl Preference {
    /// `a ≤ut b`: `b` is at least as good as `a`.
    pub fn leq(self, a: &Rational, b: &Rational) -> bool {
        match self {
            Preference::Max => a <= b,
            Preference::Min => a >= b,
        }
    }

    /// `a` is strictly better than `b`.
    pub fn better(self, a: &Rational, b: &Rational) -> bool {
        !self.leq(a, b)
    }

    fn sign(self) -> Rational {
        match self {
            Preference::Max => Rational::one(),
            Preference::Min => -Rational::one(),
        }
    }

    pub fn keyword(self) -> &'static str {
        match self {
            Preference::Max => "max",
            Preference::Min => "min",
        }
    }
}

/// `k ↦ slope·k + offset`, or `k ↦ max(0, slope·k + offset)` when clamped.
///
/// Equality is coefficient equality: a clamped function never equals an
/// unclamped one even where they agree on every natural.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AffineUtility {
    pub slope: Rational,
    pub offset: Rational,
    pub clamped: bool,
}

impl AffineUtility {
    pub fn new(slope: Rational, offset: Rational) -> Self {
        AffineUtility { slope, offset, clamped: false }
    }

    pub fn clamped(slope: Rational, offset: Rational) -> Self {
        AffineUtility { slope, offset, clamped: true }
    }

    pub fn constant(value: Rational) -> Self {
        AffineUtility::new(Rational::zero(), value)
    }

    pub fn eval(&self, k: u64) -> Rational {
        self.eval_at(&rat_k(k))
    }

    fn eval_at(&self, k: &Rational) -> Rational {
        let raw = &self.slope * k + &self.offset;
        if self.clamped && raw.is_negative() {
            Rational::zero()
        } else {
            raw
        }
    }

    /// The function `k ↦ self(k + delta)`.
    pub fn shift(&self, delta: u64) -> Self {
        AffineUtility {
            slope: self.slope.clone(),
            offset: &self.offset + &self.slope * rat_k(delta),
            clamped: self.clamped,
        }
    }

    /// Counter value at which the clamp switches between zero and the raw
    /// line, if it ever does on the naturals. The piece in force is constant
    /// on either side of this point.
    fn clamp_breakpoint(&self) -> Option<u64> {
        if !self.clamped || self.slope.is_zero() {
            return None;
        }
        let root = -&self.offset / &self.slope;
        let point = if self.slope.is_positive() {
            root.ceil().to_integer()
        } else {
            root.floor().to_integer() + BigInt::one()
        };
        if point.is_positive() {
            Some(point.to_u64().unwrap_or(u64::MAX))
        } else {
            None
        }
    }

    /// The unclamped line in force at `k`.
    fn piece_at(&self, k: u64) -> (Rational, Rational) {
        if self.clamped && (&self.slope * rat_k(k) + &self.offset).is_negative() {
            (Rational::zero(), Rational::zero())
        } else {
            (self.slope.clone(), self.offset.clone())
        }
    }
}

impl fmt::Display for AffineUtility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body = affine_text(&self.slope, &self.offset);
        if self.clamped {
            write!(f, "nat({body})")
        } else {
            f.write_str(&body)
        }
    }
}

fn affine_text(slope: &Rational, offset: &Rational) -> String {
    if slope.is_zero() {
        return fmt_rational(offset);
    }
    let mut s = if slope.is_one() {
        "k".to_string()
    } else {
        format!("{}*k", fmt_rational(slope))
    };
    if offset.is_positive() {
        s.push_str(&format!(" + {}", fmt_rational(offset)));
    } else if offset.is_negative() {
        s.push_str(&format!(" - {}", fmt_rational(&-offset)));
    }
    s
}

impl Serialize for AffineUtility {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = serializer.serialize_struct("AffineUtility", 4)?;
        st.serialize_field("slope", &fmt_rational(&self.slope))?;
        st.serialize_field("offset", &fmt_rational(&self.offset))?;
        st.serialize_field("clamped", &self.clamped)?;
        st.serialize_field("expr", &self.to_string())?;
        st.end()
    }
}

/// Smallest `k ≥ from` at which `candidate(k)` is strictly better than
/// `reference(k)`, or `None` if `candidate ≤ut reference` on all of `[from, ∞)`.
///
/// The counter axis is split at the clamp breakpoints of both sides; on each
/// segment the signed difference is a single line and its first positive
/// point is solved exactly.
pub fn first_violation(
    candidate: &AffineUtility,
    reference: &AffineUtility,
    pref: Preference,
    from: u64,
) -> Option<u64> {
    let mut cuts: Vec<u64> = [candidate.clamp_breakpoint(), reference.clamp_breakpoint()]
        .into_iter()
        .flatten()
        .filter(|&c| c > from)
        .collect();
    cuts.sort_unstable();
    cuts.dedup();

    let sign = pref.sign();
    let mut lo = from;
    for i in 0..=cuts.len() {
        let hi = cuts.get(i).map(|c| c - 1);
        let (cs, co) = candidate.piece_at(lo);
        let (rs, ro) = reference.piece_at(lo);
        // violation iff alpha·k + beta > 0
        let alpha = &sign * (cs - rs);
        let beta = &sign * (co - ro);
        if let Some(k) = first_positive(&alpha, &beta, lo) {
            if hi.is_none_or(|h| k <= h) {
                return Some(k);
            }
        }
        if let Some(&c) = cuts.get(i) {
            lo = c;
        }
    }
    None
}

fn first_positive(alpha: &Rational, beta: &Rational, lo: u64) -> Option<u64> {
    let at_lo = alpha * rat_k(lo) + beta;
    if at_lo.is_positive() {
        return Some(lo);
    }
    if !alpha.is_positive() {
        return None;
    }
    // smallest integer strictly above -beta/alpha
    let t = (-beta / alpha).floor().to_integer() + BigInt::one();
    Some(t.to_u64().unwrap_or(u64::MAX).max(lo))
}

/// `candidate(k) ≤ut reference(k)` for every natural `k ≥ from`.
pub fn affine_leq_forall(
    candidate: &AffineUtility,
    reference: &AffineUtility,
    pref: Preference,
    from: u64,
) -> bool {
    first_violation(candidate, reference, pref, from).is_none()
}
