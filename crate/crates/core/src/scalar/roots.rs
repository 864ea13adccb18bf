//! Rational roots of polynomials with rational coefficients.
//!
//! The polynomial is cleared of denominators, made primitive and square-free.
//! Every rational root `p/q` of a primitive integer polynomial with leading
//! coefficient `c` satisfies `q | c`, so it is of the form `k/c` with `k` an
//! integer. Real roots are isolated with a Sturm sequence and each isolating
//! interval is bisected until it is shorter than `1/c`; at that point it holds
//! at most one candidate `k/c`, which is tested exactly. The bit cost is
//! polynomial in the size of the input, unlike enumerating divisors of the
//! extreme coefficients.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{Field, Rational, ScalarError, UniPoly};

/// All distinct rational roots of `p`, in increasing order. Exact mode only.
pub fn rational_roots<F: Field>(p: &UniPoly<F>) -> Result<Vec<F>, ScalarError> {
    if !F::is_exact() {
        return Err(ScalarError::NotExactMode);
    }
    if p.is_zero() {
        return Err(ScalarError::ZeroPolynomial);
    }
    let q = UniPoly::new(
        p.coeffs()
            .iter()
            .map(|c| c.to_rational().ok_or(ScalarError::NotExactMode))
            .collect::<Result<Vec<_>, _>>()?,
    );
    Ok(roots_over_q(&q).iter().map(F::from_rational).collect())
}

fn roots_over_q(p: &UniPoly<Rational>) -> Vec<Rational> {
    let f = primitive(p);
    let g = f.gcd(&f.derivative());
    let mut sf = primitive(&f.div_rem(&g).0);

    let mut roots = Vec::new();
    if sf.coeffs()[0].is_zero() {
        roots.push(Rational::zero());
        sf = UniPoly::new(sf.coeffs()[1..].to_vec());
    }
    if sf.degree().unwrap_or(0) == 0 {
        return roots;
    }

    let lead = sf.leading().expect("nonzero").abs();
    let bound = cauchy_bound(&sf);
    let sturm = SturmChain::new(&sf);
    let lo = -bound.clone();
    let count = sturm.variations(&lo) - sturm.variations(&bound);
    isolate(&sf, &sturm, &lead, lo, bound, count, &mut roots);
    roots.sort();
    roots
}

/// Scales `p` to an integer polynomial with coprime coefficients and positive
/// leading coefficient.
fn primitive(p: &UniPoly<Rational>) -> UniPoly<Rational> {
    let lcm = p
        .coeffs()
        .iter()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = p
        .coeffs()
        .iter()
        .map(|c| (c * Rational::from_integer(lcm.clone())).to_integer())
        .collect();
    let mut content = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    if ints.last().is_some_and(|l| l.is_negative()) {
        content = -content;
    }
    UniPoly::new(
        ints.into_iter()
            .map(|c| Rational::from_integer(c / &content))
            .collect(),
    )
}

/// Strict upper bound on the absolute value of every root.
fn cauchy_bound(p: &UniPoly<Rational>) -> Rational {
    let lead = p.leading().expect("nonzero").abs();
    let max_ratio = p.coeffs()[..p.coeffs().len() - 1]
        .iter()
        .map(|c| c.abs() / lead.clone())
        .max()
        .unwrap_or_else(Rational::zero);
    (max_ratio + Rational::one()).ceil() + Rational::one()
}

struct SturmChain {
    chain: Vec<UniPoly<Rational>>,
}

impl SturmChain {
    fn new(p: &UniPoly<Rational>) -> Self {
        let mut chain = vec![p.clone(), p.derivative()];
        loop {
            let n = chain.len();
            let (_, r) = chain[n - 2].div_rem(&chain[n - 1]);
            if r.is_zero() {
                break;
            }
            // Positive rescaling keeps every sign and keeps coefficients small.
            let l = r.leading().expect("nonzero").abs();
            chain.push(r.scale(&-(Rational::one() / l)));
        }
        Self { chain }
    }

    fn variations(&self, x: &Rational) -> usize {
        let mut count = 0;
        let mut last = 0i8;
        for p in &self.chain {
            let v = p.eval(x);
            let s = if v.is_positive() {
                1
            } else if v.is_negative() {
                -1
            } else {
                continue;
            };
            if last != 0 && s != last {
                count += 1;
            }
            last = s;
        }
        count
    }
}

/// Collects the rational roots lying in `(lo, hi]`, which holds `count`
/// distinct real roots.
fn isolate(
    p: &UniPoly<Rational>,
    sturm: &SturmChain,
    lead: &Rational,
    lo: Rational,
    hi: Rational,
    count: usize,
    out: &mut Vec<Rational>,
) {
    match count {
        0 => {}
        1 => {
            if let Some(root) = refine(p, sturm, lead, lo, hi) {
                out.push(root);
            }
        }
        _ => {
            let mid = (lo.clone() + hi.clone()) / Rational::from_i64(2);
            let left = sturm.variations(&lo) - sturm.variations(&mid);
            isolate(p, sturm, lead, lo, mid.clone(), left, out);
            isolate(p, sturm, lead, mid, hi, count - left, out);
        }
    }
}

/// The single real root in `(lo, hi]`, if it is rational.
fn refine(
    p: &UniPoly<Rational>,
    sturm: &SturmChain,
    lead: &Rational,
    mut lo: Rational,
    mut hi: Rational,
) -> Option<Rational> {
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    let min_width = Rational::one() / lead.clone();
    loop {
        if p.eval(&hi).is_zero() {
            return Some(hi);
        }
        if hi.clone() - lo.clone() < min_width {
            // At most one k in (lead*lo, lead*hi].
            let k = (hi.clone() * lead.clone()).floor();
            let candidate = k / lead.clone();
            return (candidate > lo && p.eval(&candidate).is_zero()).then_some(candidate);
        }
        let mid = (lo.clone() + hi.clone()) * half.clone();
        if sturm.variations(&lo) - sturm.variations(&mid) == 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
}
