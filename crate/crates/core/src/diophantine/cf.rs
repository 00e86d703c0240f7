//! Continued fractions and convergents.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::exact::ExactReal;
use crate::{Error, Result};

/// Safety cap on quadratic expansions before a period must have appeared.
const MAX_SURD_STEPS: usize = 1_000_000;

/// How an expansion ends.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Termination {
    /// All partial quotients are listed; last one is at least 2 unless the
    /// number is an integer.
    Finite,
    /// `terms[period_start..]` repeats forever.
    Periodic { period_start: usize, period: usize },
    /// Only a prefix is known. `precision_limited` is set when an enclosure
    /// stopped the expansion before `requested` terms.
    Truncated {
        trustworthy: usize,
        requested: usize,
        precision_limited: bool,
    },
}

/// `[a0; a1, a2, …]` with `a_k >= 1` for `k >= 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ContinuedFraction {
    #[serde(serialize_with = "ser_bigints")]
    terms: Vec<BigInt>,
    termination: Termination,
}

fn ser_bigints<S: serde::Serializer>(v: &[BigInt], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| x.to_string()))
}

/// The `n`-th convergent `p_n / q_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Convergent {
    pub index: usize,
    pub p: BigInt,
    pub q: BigInt,
}

impl Convergent {
    pub fn value(&self) -> BigRational {
        BigRational::new(self.p.clone(), self.q.clone())
    }
}

/// Supremum of the partial quotients `a_k`, `k >= 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientSup {
    pub value: BigInt,
    /// True when the whole expansion is known (finite or periodic).
    pub certain: bool,
    /// Number of partial quotients `a_1..` inspected.
    pub examined: usize,
}

impl ContinuedFraction {
    pub fn new(terms: Vec<BigInt>, termination: Termination) -> Self {
        Self { terms, termination }
    }

    /// Stored terms: the whole expansion, the preperiod plus one period, or
    /// the trusted prefix.
    pub fn terms(&self) -> &[BigInt] {
        &self.terms
    }

    pub fn termination(&self) -> &Termination {
        &self.termination
    }

    pub fn a0(&self) -> &BigInt {
        &self.terms[0]
    }

    pub fn is_periodic(&self) -> bool {
        matches!(self.termination, Termination::Periodic { .. })
    }

    /// Number of available terms; `None` for periodic expansions.
    pub fn available(&self) -> Option<usize> {
        match self.termination {
            Termination::Periodic { .. } => None,
            _ => Some(self.terms.len()),
        }
    }

    /// The `i`-th term, unrolling periods.
    pub fn term(&self, i: usize) -> Option<&BigInt> {
        if i < self.terms.len() {
            return Some(&self.terms[i]);
        }
        match self.termination {
            Termination::Periodic {
                period_start,
                period,
            } => Some(&self.terms[period_start + (i - period_start) % period]),
            _ => None,
        }
    }

    /// First `n` terms (fewer if the expansion is shorter).
    pub fn prefix(&self, n: usize) -> Vec<BigInt> {
        (0..n).map_while(|i| self.term(i).cloned()).collect()
    }

    /// Exact value of a finite or periodic expansion.
    pub fn to_exact(&self) -> Result<ExactReal> {
        match self.termination {
            Termination::Finite => {
                let c = convergents(self, self.terms.len())?;
                Ok(ExactReal::Rational(c.last().expect("nonempty").value()))
            }
            Termination::Periodic {
                period_start,
                period,
            } => {
                // tail y = [b0; …, b_{m-1}, y]  ⇒  Q y² + (Q' - P) y - P' = 0
                let block = ContinuedFraction::new(
                    self.terms[period_start..period_start + period].to_vec(),
                    Termination::Finite,
                );
                let (pm, pm1, qm, qm1) = recurrence_tail(&block);
                let b = &qm1 - &pm;
                let disc = &b * &b + BigInt::from(4) * &qm * &pm1;
                let tail = ExactReal::surd(-b, BigInt::one(), disc, BigInt::from(2) * &qm)?;
                if period_start == 0 {
                    return Ok(tail);
                }
                let head = ContinuedFraction::new(
                    self.terms[..period_start].to_vec(),
                    Termination::Finite,
                );
                let (p1, p2, q1, q2) = recurrence_tail(&head);
                let num = tail.mul_int(&p1).add(&ExactReal::integer(p2));
                let den = tail.mul_int(&q1).add(&ExactReal::integer(q2));
                num.div(&den)
            }
            Termination::Truncated { .. } => Err(Error::invalid(
                "a truncated continued fraction has no exact value",
            )),
        }
    }
}

/// Last two numerators and denominators `(p_n, p_{n-1}, q_n, q_{n-1})`.
fn recurrence_tail(cf: &ContinuedFraction) -> (BigInt, BigInt, BigInt, BigInt) {
    let (mut p1, mut p2) = (BigInt::one(), BigInt::zero());
    let (mut q1, mut q2) = (BigInt::zero(), BigInt::one());
    for a in cf.terms() {
        let p = a * &p1 + &p2;
        let q = a * &q1 + &q2;
        p2 = std::mem::replace(&mut p1, p);
        q2 = std::mem::replace(&mut q1, q);
    }
    (p1, p2, q1, q2)
}

fn expand_rational(x: &BigRational, depth: usize) -> ContinuedFraction {
    let (mut n, mut d) = (x.numer().clone(), x.denom().clone());
    let mut terms = Vec::new();
    while !d.is_zero() {
        if terms.len() == depth {
            return ContinuedFraction::new(
                terms,
                Termination::Truncated {
                    trustworthy: depth,
                    requested: depth,
                    precision_limited: false,
                },
            );
        }
        let (a, r) = n.div_mod_floor(&d);
        terms.push(a);
        n = std::mem::replace(&mut d, r);
    }
    ContinuedFraction::new(terms, Termination::Finite)
}

/// Expansion of `(P + √D)/Q` with `Q | D - P²`, detecting the period.
fn expand_reduced_surd(mut p: BigInt, d: BigInt, mut q: BigInt) -> ContinuedFraction {
    let root = d.sqrt();
    let mut seen: HashMap<(BigInt, BigInt), usize> = HashMap::new();
    let mut terms = Vec::new();
    for i in 0..MAX_SURD_STEPS {
        if let Some(&start) = seen.get(&(p.clone(), q.clone())) {
            return ContinuedFraction::new(
                terms,
                Termination::Periodic {
                    period_start: start,
                    period: i - start,
                },
            );
        }
        seen.insert((p.clone(), q.clone()), i);
        let a = if q.is_positive() {
            (&p + &root).div_floor(&q)
        } else {
            (-&p - &root - BigInt::one()).div_floor(&(-&q))
        };
        let p_next = &a * &q - &p;
        let q_next = (&d - &p_next * &p_next) / &q;
        terms.push(a);
        p = p_next;
        q = q_next;
    }
    ContinuedFraction::new(
        terms,
        Termination::Truncated {
            trustworthy: MAX_SURD_STEPS,
            requested: MAX_SURD_STEPS,
            precision_limited: false,
        },
    )
}

fn expand_interval(mut lo: BigRational, mut hi: BigRational, depth: usize) -> ContinuedFraction {
    let mut terms = Vec::new();
    let mut precision_limited = false;
    while terms.len() < depth {
        let a = lo.floor();
        if a != hi.floor() {
            precision_limited = true;
            break;
        }
        terms.push(a.to_integer());
        let (l, h) = (&lo - &a, &hi - &a);
        if l.is_zero() {
            if h.is_zero() {
                return ContinuedFraction::new(terms, Termination::Finite);
            }
            precision_limited = true;
            break;
        }
        // x ↦ 1/x is decreasing on the positive reals
        lo = h.recip();
        hi = l.recip();
    }
    let n = terms.len();
    ContinuedFraction::new(
        terms,
        Termination::Truncated {
            trustworthy: n,
            requested: depth,
            precision_limited,
        },
    )
}

/// Canonical continued fraction of `x`.
///
/// Rationals terminate (truncated after `depth` terms if longer), quadratic
/// surds always come back periodic, and enclosures keep only the quotients
/// on which both endpoints agree, up to `depth`.
pub fn cf_expand(x: &ExactReal, depth: usize) -> Result<ContinuedFraction> {
    if depth == 0 {
        return Err(Error::invalid("continued fraction depth must be at least 1"));
    }
    Ok(match x {
        ExactReal::Rational(r) => expand_rational(r, depth),
        ExactReal::Quadratic(s) => {
            // (p + q√d)/r = (P + √D)/Q with P = ±pr, D = q²dr², Q = ±r²
            let r2 = s.r() * s.r();
            let dd = s.q() * s.q() * s.d() * &r2;
            let (p, q) = if s.q().is_positive() {
                (s.p() * s.r(), r2)
            } else {
                (-(s.p() * s.r()), -r2)
            };
            expand_reduced_surd(p, dd, q)
        }
        ExactReal::Float(e) => {
            if e.is_point() {
                expand_rational(&e.lo(), depth)
            } else {
                expand_interval(e.lo(), e.hi(), depth)
            }
        }
    })
}

/// The first `count` convergents.
pub fn convergents(cf: &ContinuedFraction, count: usize) -> Result<Vec<Convergent>> {
    if let Some(n) = cf.available() {
        if count > n {
            return Err(Error::invalid(format!(
                "requested {count} convergents but only {n} partial quotients are known"
            )));
        }
    }
    let (mut p1, mut p2) = (BigInt::one(), BigInt::zero());
    let (mut q1, mut q2) = (BigInt::zero(), BigInt::one());
    let mut out = Vec::with_capacity(count);
    for index in 0..count {
        let a = cf.term(index).expect("checked availability");
        let p = a * &p1 + &p2;
        let q = a * &q1 + &q2;
        out.push(Convergent {
            index,
            p: p.clone(),
            q: q.clone(),
        });
        p2 = std::mem::replace(&mut p1, p);
        q2 = std::mem::replace(&mut q1, q);
    }
    Ok(out)
}

/// `K(x) = sup_{k>=1} a_k`, exact for finite and periodic expansions.
pub fn partial_quotient_sup(x: &ExactReal, depth: usize) -> Result<QuotientSup> {
    let cf = cf_expand(x, depth.max(1))?;
    let terms = cf.terms();
    let mut value = terms.iter().skip(1).max().cloned().unwrap_or_else(BigInt::zero);
    let certain = match cf.termination() {
        Termination::Finite => true,
        Termination::Periodic { period_start, .. } => {
            if let Some(m) = terms[*period_start..].iter().max() {
                value = value.max(m.clone());
            }
            true
        }
        Termination::Truncated { .. } => false,
    };
    Ok(QuotientSup {
        value,
        certain,
        examined: terms.len().saturating_sub(1),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn rational_expansions() {
        let cf = cf_expand(&ExactReal::ratio(355, 113).unwrap(), 20).unwrap();
        assert_eq!(cf.terms(), ints(&[3, 7, 16]).as_slice());
        assert_eq!(cf.termination(), &Termination::Finite);
        let cf = cf_expand(&ExactReal::ratio(1, 3).unwrap(), 20).unwrap();
        assert_eq!(cf.terms(), ints(&[0, 3]).as_slice());
        let cf = cf_expand(&ExactReal::ratio(-7, 3).unwrap(), 20).unwrap();
        assert_eq!(cf.terms(), ints(&[-3, 1, 2]).as_slice());
        let cf = cf_expand(&ExactReal::integer(4), 20).unwrap();
        assert_eq!(cf.terms(), ints(&[4]).as_slice());
    }

    #[test]
    fn rational_depth_limit_truncates() {
        let cf = cf_expand(&ExactReal::ratio(355, 113).unwrap(), 2).unwrap();
        assert_eq!(cf.terms(), ints(&[3, 7]).as_slice());
        assert!(matches!(cf.termination(), Termination::Truncated { precision_limited: false, .. }));
    }

    #[test]
    fn periodic_expansions() {
        let cf = cf_expand(&ExactReal::sqrt_of(2).unwrap(), 5).unwrap();
        assert_eq!(cf.terms(), ints(&[1, 2]).as_slice());
        assert_eq!(
            cf.termination(),
            &Termination::Periodic {
                period_start: 1,
                period: 1
            }
        );
        assert_eq!(cf.prefix(5), ints(&[1, 2, 2, 2, 2]));

        let phi = ExactReal::surd(1, 1, 5, 2).unwrap();
        let cf = cf_expand(&phi, 5).unwrap();
        assert_eq!(cf.prefix(6), ints(&[1, 1, 1, 1, 1, 1]));

        // √7 = [2; 1, 1, 1, 4]
        let cf = cf_expand(&ExactReal::sqrt_of(7).unwrap(), 5).unwrap();
        assert_eq!(cf.prefix(9), ints(&[2, 1, 1, 1, 4, 1, 1, 1, 4]));
        assert!(cf.is_periodic());

        // negative surd: -√2 = [-2; 1, 1, 2, 2, …]
        let cf = cf_expand(&ExactReal::sqrt_of(2).unwrap().neg(), 5).unwrap();
        assert_eq!(cf.prefix(6), ints(&[-2, 1, 1, 2, 2, 2]));
    }

    #[test]
    fn periodic_round_trip() {
        for x in [
            ExactReal::sqrt_of(2).unwrap(),
            ExactReal::golden_fraction(),
            ExactReal::surd(3, -2, 7, 5).unwrap(),
            ExactReal::sqrt_of(2).unwrap().neg(),
            ExactReal::surd(-17, 3, 13, 4).unwrap(),
        ] {
            let cf = cf_expand(&x, 1).unwrap();
            assert_eq!(cf.to_exact().unwrap(), x);
        }
    }

    #[test]
    fn float_expansion_stops_at_precision() {
        let e: ExactReal = "root:3:2".parse().unwrap();
        let cf = cf_expand(&e, 1000).unwrap();
        // 2^(1/3) = [1; 3, 1, 5, 1, 1, 4, 1, 1, 8, …]
        assert_eq!(cf.prefix(10), ints(&[1, 3, 1, 5, 1, 1, 4, 1, 1, 8]));
        match cf.termination() {
            Termination::Truncated {
                trustworthy,
                precision_limited,
                ..
            } => {
                assert!(*precision_limited);
                assert!(*trustworthy > 30 && *trustworthy < 200, "{trustworthy}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn convergent_examples() {
        let cf = cf_expand(&ExactReal::ratio(1, 3).unwrap(), 10).unwrap();
        let c = convergents(&cf, 2).unwrap();
        assert_eq!((c[0].p.clone(), c[0].q.clone()), (0.into(), 1.into()));
        assert_eq!((c[1].p.clone(), c[1].q.clone()), (1.into(), 3.into()));

        let cf = ContinuedFraction::new(ints(&[1, 2, 2]), Termination::Finite);
        let v: Vec<_> = convergents(&cf, 3).unwrap().iter().map(|c| c.value()).collect();
        assert_eq!(
            v,
            vec![
                BigRational::new(1.into(), 1.into()),
                BigRational::new(3.into(), 2.into()),
                BigRational::new(7.into(), 5.into())
            ]
        );

        let cf = cf_expand(&ExactReal::surd(1, 1, 5, 2).unwrap(), 1).unwrap();
        let c = convergents(&cf, 10).unwrap();
        let fib = [1, 1, 2, 3, 5, 8, 13, 21, 34, 55, 89];
        for (n, conv) in c.iter().enumerate() {
            assert_eq!(conv.p, BigInt::from(fib[n + 1]));
            assert_eq!(conv.q, BigInt::from(fib[n]));
        }
        assert!(convergents(&ContinuedFraction::new(ints(&[0, 3]), Termination::Finite), 3).is_err());
    }

    #[test]
    fn quotient_sup_examples() {
        let k = partial_quotient_sup(&ExactReal::surd(1, 1, 5, 2).unwrap(), 10).unwrap();
        assert_eq!((k.value, k.certain), (1.into(), true));
        let k = partial_quotient_sup(&ExactReal::sqrt_of(2).unwrap(), 10).unwrap();
        assert_eq!((k.value, k.certain), (2.into(), true));
        let k = partial_quotient_sup(&ExactReal::ratio(22, 7).unwrap(), 10).unwrap();
        assert_eq!((k.value, k.certain), (7.into(), true));
        let k = partial_quotient_sup(&"float:0.718281828459045".parse().unwrap(), 8).unwrap();
        assert!(!k.certain);
        assert_eq!(k.examined, 7);
    }
}
