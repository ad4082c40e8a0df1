use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::connections::{connection_graph, find_reversor, graded_isomorphic};
use crate::error::{Error, Result};
use crate::invariants::MorsePolynomial;
use crate::meander::Meander;
use crate::three_nose::{build_three_nose_meander, three_nose_permutation};

/// A finite continued fraction `[b_0, b_1, ..., b_m]`, normalized to even
/// length index `m` (allowing a final 1), with `b_0 >= 0` and all later
/// entries strictly positive. It encodes the reduced fraction
/// `n_0 / (q+1)` of a 3-nose arc configuration.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct ContinuedFraction {
    b: Vec<u64>,
}

impl ContinuedFraction {
    pub fn new(b: Vec<u64>) -> Result<ContinuedFraction> {
        let text = format_terms(&b);
        if b.is_empty() {
            return Err(Error::BadContinuedFraction(text, "empty".into()));
        }
        if b.len() % 2 == 0 {
            return Err(Error::BadContinuedFraction(
                text,
                "length must be odd (even m)".into(),
            ));
        }
        if b[1..].contains(&0) {
            return Err(Error::BadContinuedFraction(
                text,
                "entries after b_0 must be positive".into(),
            ));
        }
        Ok(ContinuedFraction { b })
    }

    /// Euclidean expansion of `n0 / d0` for coprime input, normalized to
    /// even `m` by splitting the final quotient when necessary.
    pub fn expand(n0: u64, d0: u64) -> Result<ContinuedFraction> {
        if d0 < 2 {
            return Err(Error::BadContinuedFraction(
                format!("{n0}/{d0}"),
                "denominator must be at least 2".into(),
            ));
        }
        if gcd(n0, d0) != 1 {
            return Err(Error::NotCoprimeMod { a: d0, n: n0 });
        }
        let mut terms = Vec::new();
        let (mut a, mut b) = (n0, d0);
        while b != 0 {
            terms.push(a / b);
            let r = a % b;
            a = b;
            b = r;
        }
        Ok(ContinuedFraction { b: normalize(terms) })
    }

    pub fn terms(&self) -> &[u64] {
        &self.b
    }

    /// Length index `m` (one less than the number of terms).
    pub fn m(&self) -> usize {
        self.b.len() - 1
    }

    /// Evaluates to the reduced fraction `(n_0, q+1)`.
    pub fn evaluate(&self) -> (u64, u64) {
        let mut num = *self.b.last().unwrap();
        let mut den = 1u64;
        for &term in self.b.iter().rev().skip(1) {
            let next_num = term * num + den;
            den = num;
            num = next_num;
        }
        debug_assert_eq!(gcd(num, den), 1);
        (num, den)
    }

    /// Order reversal, renormalized to even `m`. Evaluation of the reversal
    /// has the same numerator and the multiplicatively inverse denominator
    /// modulo it.
    pub fn reversed(&self) -> ContinuedFraction {
        let mut rev: Vec<u64> = self.b.iter().rev().copied().collect();
        // A leading zero of the original becomes a dangling trailing zero:
        // [.., x, 0] collapses to [..].
        if rev.last() == Some(&0) {
            rev.pop();
            rev.pop();
        }
        ContinuedFraction { b: normalize(rev) }
    }

    /// Symmetry under order reversal, equivalently isotropy of the
    /// underlying permutation under the combined trivial equivalence. For
    /// genuinely 3-nose input this coincides with the divisor criterion
    /// `n_0 | (q+1)^2 - 1`, which is cross-checked here.
    pub fn is_isotropic(&self) -> bool {
        let symmetric = *self == self.reversed();
        if self.b[0] >= 1 {
            let (n0, den) = self.evaluate();
            let divides = (den as u128 * den as u128 - 1) % n0 as u128 == 0;
            assert_eq!(
                symmetric, divides,
                "palindromicity and the divisor criterion must agree on {self}"
            );
        }
        symmetric
    }
}

impl fmt::Display for ContinuedFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_terms(&self.b))
    }
}

fn format_terms(b: &[u64]) -> String {
    let inner = b
        .iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(",");
    format!("[{inner}]")
}

fn normalize(mut terms: Vec<u64>) -> Vec<u64> {
    if terms.len() % 2 == 0 {
        let last = terms.pop().unwrap();
        debug_assert!(last >= 2, "canonical Euclid ends with a quotient >= 2");
        terms.push(last - 1);
        terms.push(1);
    }
    terms
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// The unique multiplicative inverse of `a` in `{1, ..., n0-1}` modulo
/// `n0`, by the extended Euclidean algorithm.
pub fn mod_inverse(a: u64, n0: u64) -> Result<u64> {
    if gcd(a % n0, n0) != 1 {
        return Err(Error::NotCoprimeMod { a, n: n0 });
    }
    let (mut old_r, mut r) = (a as i128 % n0 as i128, n0 as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let quotient = old_r / r;
        (old_r, r) = (r, old_r - quotient * r);
        (old_s, s) = (s, old_s - quotient * s);
    }
    let inv = old_s.rem_euclid(n0 as i128) as u64;
    debug_assert_eq!((a as u128 * inv as u128) % n0 as u128, 1);
    Ok(inv)
}

/// Quantities determined by a continued fraction of a 3-nose configuration:
/// nest sizes, the minimal number of suspensions to reach a Sturm meander,
/// attractor dimension, and arc counts before and after suspension.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DerivedQuantities {
    pub p: u64,
    pub q: u64,
    pub n0: u64,
    /// Suspensions needed: the negative of the minimal formal Morse index.
    pub s: u64,
    /// Attractor dimension after suspension.
    pub d: u64,
    /// Total arcs after suspension.
    pub n: u64,
}

pub fn derived_quantities(cf: &ContinuedFraction) -> Result<DerivedQuantities> {
    if cf.m() < 2 {
        return Err(Error::BadContinuedFraction(
            cf.to_string(),
            "m >= 2 is required for a 3-nose configuration".into(),
        ));
    }
    let (n0, den) = cf.evaluate();
    let q = den - 1;
    let p = n0 - q;
    let odd_sum: u64 = cf.terms().iter().skip(1).step_by(2).sum();
    let s = odd_sum - 1;
    let d = cf.terms().iter().sum::<u64>() - 1;
    let n = n0 + s;
    if cf.m() == 2 {
        let product: u64 = cf.terms().iter().product();
        assert_eq!(n, d + product, "arc-count identity failed for {cf}");
    }
    Ok(DerivedQuantities { p, q, n0, s, d, n })
}

/// Dense integer polynomial helpers, ascending coefficients.
mod poly {
    pub fn mul(a: &[i64], b: &[i64]) -> Vec<i64> {
        let mut out = vec![0; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        out
    }

    pub fn add(a: &[i64], b: &[i64]) -> Vec<i64> {
        let mut out = vec![0; a.len().max(b.len())];
        for (i, &x) in a.iter().enumerate() {
            out[i] += x;
        }
        for (i, &y) in b.iter().enumerate() {
            out[i] += y;
        }
        out
    }

    /// x^k - 1.
    pub fn power_minus_one(k: u64) -> Vec<i64> {
        let mut out = vec![0; k as usize + 1];
        out[0] = -1;
        out[k as usize] = 1;
        if k == 0 {
            out[0] = 0;
        }
        out
    }

    /// Exact division by (x - 1); returns None on a nonzero remainder.
    pub fn divide_by_x_minus_one(a: &[i64]) -> Option<Vec<i64>> {
        // Synthetic division at 1: remainder is the coefficient sum.
        let mut quotient = vec![0; a.len().saturating_sub(1)];
        let mut carry = 0;
        for i in (1..a.len()).rev() {
            carry += a[i];
            quotient[i - 1] = carry;
        }
        if carry + a[0] != 0 {
            return None;
        }
        Some(quotient)
    }

    pub fn trim(mut a: Vec<i64>) -> Vec<i64> {
        while a.len() > 1 && *a.last().unwrap() == 0 {
            a.pop();
        }
        a
    }
}

/// The pointed Morse polynomial of a short continued fraction
/// `[b0, b1, b2]`, extracted by exact integer polynomial division from
///
/// ```text
/// (x-1)^3 (x/(x+1)) M(x) = (x-1)^2 (x^{b0+b1+b2} - 1)
///                          + x (x^{b0}-1)(x^{b1}-1)(x^{b2}-1).
/// ```
///
/// The result is symmetric under any permutation of the three entries.
pub fn short_morse_polynomial(b0: u64, b1: u64, b2: u64) -> Result<MorsePolynomial> {
    assert!(b1 >= 1 && b2 >= 1);
    let square = poly::mul(&[1, -2, 1], &poly::power_minus_one(b0 + b1 + b2));
    let cubes = poly::mul(
        &[0, 1],
        &poly::mul(
            &poly::power_minus_one(b0),
            &poly::mul(&poly::power_minus_one(b1), &poly::power_minus_one(b2)),
        ),
    );
    let rhs = poly::trim(poly::add(&square, &cubes));
    // x * M(x) = rhs * (x+1) / (x-1)^3.
    let mut q = poly::mul(&rhs, &[1, 1]);
    for _ in 0..3 {
        q = poly::divide_by_x_minus_one(&q).ok_or(Error::InexactDivision)?;
    }
    let q = poly::trim(q);
    // q[i] is the count at Morse level i-1.
    let mut counts = BTreeMap::new();
    for (i, &c) in q.iter().enumerate() {
        if c < 0 {
            return Err(Error::InexactDivision);
        }
        if c > 0 {
            counts.insert(i as i64 - 1, c as usize);
        }
    }
    let mp = MorsePolynomial::from_counts(counts);
    let d = mp.degree();
    assert_eq!(mp.mu(-1), 1);
    assert_eq!(mp.mu(d), 1);
    if b0 >= 1 {
        assert_eq!(mp.mu(0), 3);
        assert_eq!(mp.mu(d - 1), 3);
    }
    Ok(mp)
}

/// Reversibility verdict of one classified arc configuration.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TableRow {
    pub b: ContinuedFraction,
    pub p_minus_1: u64,
    pub q_plus_1: u64,
    pub d: u64,
    /// Whether the pointed connection graph of the suspended meander admits
    /// a reversor.
    pub rev: bool,
    /// When reversible, a Morse pair `(r1, r2)` whose pointed connection
    /// graph (a Chafee-Infante lattice) this graph is graded-isomorphic to.
    pub rev_lattice: Option<(u64, u64)>,
    pub iso: bool,
    pub s: u64,
    pub n0: u64,
    pub q_plus_1_inv: u64,
    pub p_minus_1_inv: u64,
    pub b_reversed: ContinuedFraction,
}

impl TableRow {
    /// One CSV line in the column order
    /// `b, p-1, q+1, d, rev, iso, s, n0, (q+1)*, (p-1)*, b*`.
    pub fn to_csv(&self) -> String {
        format!(
            "\"{}\",{},{},{},{},{},{},{},{},{},\"{}\"",
            self.b,
            self.p_minus_1,
            self.q_plus_1,
            self.d,
            if self.rev { "yes" } else { "no" },
            if self.iso { "yes" } else { "no" },
            self.s,
            self.n0,
            self.q_plus_1_inv,
            self.p_minus_1_inv,
            self.b_reversed,
        )
    }

    pub const CSV_HEADER: &'static str = "b,p-1,q+1,d,rev,iso,s,n0,(q+1)*,(p-1)*,b*";
}

/// The canonical representatives of all classes with `n` arcs: one per
/// reversal pair `{b, b*}`, keyed by the lexicographically smaller member.
pub fn table_classes(n: u64) -> Vec<ContinuedFraction> {
    let mut reps = std::collections::BTreeSet::new();
    for n0 in 3..=n {
        for den in 2..n0 {
            if gcd(n0, den) != 1 {
                continue;
            }
            let cf = ContinuedFraction::expand(n0, den).expect("coprime by construction");
            let dq = derived_quantities(&cf).expect("m >= 2 for den in 2..n0");
            if dq.n != n {
                continue;
            }
            let rev = cf.reversed();
            reps.insert(if cf.terms() <= rev.terms() { cf } else { rev });
        }
    }
    let mut out: Vec<ContinuedFraction> = reps.into_iter().collect();
    out.sort_by_key(|cf| {
        let mut multiset = cf.terms().to_vec();
        multiset.sort();
        (cf.m(), multiset, cf.terms().to_vec())
    });
    out
}

/// Builds, suspends, and classifies the meander of one class
/// representative.
pub fn evaluate_row(cf: &ContinuedFraction) -> Result<TableRow> {
    let dq = derived_quantities(cf)?;
    let meander = build_three_nose_meander(dq.p as usize, dq.q as usize)?;
    let sigma = meander.sigma().suspend_times(dq.s as usize)?;
    let graph = connection_graph(&sigma, true)?;
    let reversor = find_reversor(&graph);
    let rev = reversor.is_some();
    let mut rev_lattice = None;
    if rev {
        // A reversible graph is expected to be the pointed graph of some
        // Morse pair with (r1+1)(r2+1) = n+1; search the divisor pairs.
        let target = dq.n + 1;
        for r1 in 1..=dq.n {
            if (r1 + 1) > target || target % (r1 + 1) != 0 {
                continue;
            }
            let r2 = target / (r1 + 1) - 1;
            if r2 < r1 || r2 < 1 {
                continue;
            }
            let candidate =
                connection_graph(&three_nose_permutation(r1 as usize, r2 as usize), true)?;
            if graded_isomorphic(&graph, &candidate).is_some() {
                rev_lattice = Some((r1, r2));
                break;
            }
        }
    }
    let b_reversed = cf.reversed();
    let (_, den_rev) = b_reversed.evaluate();
    debug_assert_eq!(
        den_rev,
        mod_inverse(dq.q + 1, dq.n0)?,
        "reversed denominator must be the multiplicative inverse"
    );
    Ok(TableRow {
        b: cf.clone(),
        p_minus_1: dq.p - 1,
        q_plus_1: dq.q + 1,
        d: dq.d,
        rev,
        rev_lattice,
        iso: cf.is_isotropic(),
        s: dq.s,
        n0: dq.n0,
        q_plus_1_inv: mod_inverse(dq.q + 1, dq.n0)?,
        p_minus_1_inv: mod_inverse(dq.p - 1, dq.n0)?,
        b_reversed,
    })
}

/// All rows of the classification table for `n` arcs, in the deterministic
/// order (length, sorted entries, lexicographic).
pub fn enumerate_table(n: u64) -> Result<Vec<TableRow>> {
    table_classes(n).iter().map(evaluate_row).collect()
}

/// CSV rendering with header, one line per row.
pub fn table_csv(rows: &[TableRow]) -> String {
    let mut out = String::from(TableRow::CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&row.to_csv());
        out.push('\n');
    }
    out
}

/// Suspends the meander of a 3-nose class until it is Sturm and reports the
/// resulting permutation. Exposed for the command-line pipeline.
pub fn suspended_sturm_meander(cf: &ContinuedFraction) -> Result<Meander> {
    let dq = derived_quantities(cf)?;
    let meander = build_three_nose_meander(dq.p as usize, dq.q as usize)?;
    let sigma = meander.sigma().suspend_times(dq.s as usize)?;
    Ok(Meander::from_sigma(sigma))
}
