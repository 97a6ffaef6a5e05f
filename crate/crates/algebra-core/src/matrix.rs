//! Generic dense matrices: fraction-free LU, determinants (Bareiss, clow
//! sequences, interpolation), characteristic polynomials (fraction-free
//! Danilevsky, Hessenberg, Berkowitz) and minimal polynomials (Krylov
//! spinning over fields, multimodular over the integers).

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::dense::{self, DensePoly};
use crate::error::{Error, Result};
use crate::primes::DescendingPrimes;
use crate::ring::{
    base_ring, coerce_i64, coerce_int, fraction_field, frac_parts, integer_residue, integers,
    is_field, make_fraction, matrix_space, one, polynomial_ring, rings_equal, zero, Elem, Repr,
    Ring, RingKind,
};

#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    /// MatrixSpace handle carrying the base ring and the dimensions.
    pub space: Ring,
    /// Row-major entries, all sharing the base handle.
    pub entries: Vec<Elem>,
}

impl DenseMatrix {
    pub fn from_rows(base: &Ring, rows: Vec<Vec<Elem>>) -> Result<DenseMatrix> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut entries = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::InvalidParameter("ragged rows".into()));
            }
            for e in row {
                if !rings_equal(&e.ring, base) {
                    return Err(Error::MixedParents);
                }
                entries.push(e);
            }
        }
        Ok(DenseMatrix { space: matrix_space(base.clone(), r, c), entries })
    }

    pub fn from_fn(
        base: &Ring,
        r: usize,
        c: usize,
        mut f: impl FnMut(usize, usize) -> Result<Elem>,
    ) -> Result<DenseMatrix> {
        let mut entries = Vec::with_capacity(r * c);
        for i in 0..r {
            for j in 0..c {
                entries.push(f(i, j)?);
            }
        }
        Ok(DenseMatrix { space: matrix_space(base.clone(), r, c), entries })
    }

    pub fn identity(base: &Ring, n: usize) -> DenseMatrix {
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                entries.push(if i == j { one(base) } else { zero(base) });
            }
        }
        DenseMatrix { space: matrix_space(base.clone(), n, n), entries }
    }

    pub fn zero_matrix(base: &Ring, r: usize, c: usize) -> DenseMatrix {
        DenseMatrix {
            space: matrix_space(base.clone(), r, c),
            entries: vec![zero(base); r * c],
        }
    }

    pub fn nrows(&self) -> usize {
        match &self.space.kind {
            RingKind::MatrixSpace { rows, .. } => *rows,
            _ => unreachable!(),
        }
    }

    pub fn ncols(&self) -> usize {
        match &self.space.kind {
            RingKind::MatrixSpace { cols, .. } => *cols,
            _ => unreachable!(),
        }
    }

    pub fn base(&self) -> &Ring {
        base_ring(&self.space).expect("matrix space has a base ring")
    }

    pub fn at(&self, i: usize, j: usize) -> &Elem {
        &self.entries[i * self.ncols() + j]
    }

    pub fn rows_vec(&self) -> Vec<Vec<Elem>> {
        let c = self.ncols();
        self.entries.chunks(c).map(<[Elem]>::to_vec).collect()
    }

    pub fn transpose(&self) -> DenseMatrix {
        let (r, c) = (self.nrows(), self.ncols());
        let mut entries = Vec::with_capacity(r * c);
        for j in 0..c {
            for i in 0..r {
                entries.push(self.at(i, j).clone());
            }
        }
        DenseMatrix { space: matrix_space(self.base().clone(), c, r), entries }
    }

    pub fn add(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        if self.nrows() != other.nrows() || self.ncols() != other.ncols() {
            return Err(Error::MixedParents);
        }
        let mut entries = Vec::with_capacity(self.entries.len());
        for (a, b) in self.entries.iter().zip(other.entries.iter()) {
            entries.push(a.add(b)?);
        }
        Ok(DenseMatrix { space: self.space.clone(), entries })
    }

    pub fn sub(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        if self.nrows() != other.nrows() || self.ncols() != other.ncols() {
            return Err(Error::MixedParents);
        }
        let mut entries = Vec::with_capacity(self.entries.len());
        for (a, b) in self.entries.iter().zip(other.entries.iter()) {
            entries.push(a.sub(b)?);
        }
        Ok(DenseMatrix { space: self.space.clone(), entries })
    }

    pub fn mul(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        if self.ncols() != other.nrows() {
            return Err(Error::MixedParents);
        }
        let base = self.base();
        let (r, k, c) = (self.nrows(), self.ncols(), other.ncols());
        let mut entries = Vec::with_capacity(r * c);
        let mut t = zero(base);
        for i in 0..r {
            for j in 0..c {
                let mut acc = zero(base);
                for l in 0..k {
                    t.mul_into(self.at(i, l), other.at(l, j))?;
                    acc.add_assign_elem(&t)?;
                }
                entries.push(acc);
            }
        }
        Ok(DenseMatrix { space: matrix_space(base.clone(), r, c), entries })
    }

    pub fn mul_vec(&self, v: &[Elem]) -> Result<Vec<Elem>> {
        assert_eq!(v.len(), self.ncols());
        let base = self.base();
        let mut out = Vec::with_capacity(self.nrows());
        let mut t = zero(base);
        for i in 0..self.nrows() {
            let mut acc = zero(base);
            for j in 0..self.ncols() {
                t.mul_into(self.at(i, j), &v[j])?;
                acc.add_assign_elem(&t)?;
            }
            out.push(acc);
        }
        Ok(out)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Elem::is_zero)
    }

    /// Apply a per-entry map into another base ring.
    pub fn map_entries(
        &self,
        target: &Ring,
        mut f: impl FnMut(&Elem) -> Result<Elem>,
    ) -> Result<DenseMatrix> {
        let mut entries = Vec::with_capacity(self.entries.len());
        for e in &self.entries {
            entries.push(f(e)?);
        }
        Ok(DenseMatrix {
            space: matrix_space(target.clone(), self.nrows(), self.ncols()),
            entries,
        })
    }

    /// Companion matrix of a monic polynomial (subdiagonal units, negated
    /// coefficients in the last column).
    pub fn companion(p: &DensePoly) -> Result<DenseMatrix> {
        let base = p.base().clone();
        let n = p.coeffs.len().checked_sub(1).ok_or(Error::InvalidParameter(
            "companion matrix needs a nonconstant polynomial".into(),
        ))?;
        if n == 0 || !p.coeffs[n].is_one() {
            return Err(Error::InvalidParameter("companion matrix needs a monic nonconstant polynomial".into()));
        }
        DenseMatrix::from_fn(&base, n, n, |i, j| {
            if j == n - 1 {
                Ok(p.coeffs[i].neg())
            } else if i == j + 1 {
                Ok(one(&base))
            } else {
                Ok(zero(&base))
            }
        })
    }
}

// ---------------------------------------------------------------------------
// Fraction-free LU (Bareiss)
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct FFLUResult {
    pub rank: usize,
    /// Row permutation applied to the input: output row i came from input
    /// row permutation[i].
    pub permutation: Vec<usize>,
    /// The fraction-free reduced upper-trapezoidal matrix.
    pub u: DenseMatrix,
    /// Valid determinant when the input is square and has full rank;
    /// zero when square and rank-deficient.
    pub det_value: Elem,
}

/// Bareiss fraction-free elimination. Every division is exact over an
/// integral domain; over rings with zero divisors a failed division surfaces
/// as `ImpossibleInverse`.
pub fn fflu(m: &DenseMatrix) -> Result<FFLUResult> {
    let base = m.base().clone();
    let (nr, nc) = (m.nrows(), m.ncols());
    let mut w = m.rows_vec();
    let mut perm: Vec<usize> = (0..nr).collect();
    let mut sign_neg = false;
    let mut prev = one(&base);
    let mut rank = 0;
    let mut col = 0;
    while rank < nr && col < nc {
        let pivot_row = (rank..nr).find(|&i| !w[i][col].is_zero());
        let Some(pr) = pivot_row else {
            col += 1;
            continue;
        };
        if pr != rank {
            w.swap(pr, rank);
            perm.swap(pr, rank);
            sign_neg = !sign_neg;
        }
        let pivot = w[rank][col].clone();
        for i in rank + 1..nr {
            let head = w[i][col].clone();
            for j in col + 1..nc {
                let t = pivot.mul(&w[i][j])?.sub(&head.mul(&w[rank][j])?)?;
                w[i][j] = exact_or_impossible(&t, &prev)?;
            }
            w[i][col] = zero(&base);
        }
        prev = pivot;
        rank += 1;
        col += 1;
    }
    let det_value = if nr == nc {
        if rank == nr {
            let mut d = w[nr - 1][nc - 1].clone();
            if sign_neg {
                d = d.neg();
            }
            d
        } else {
            zero(&base)
        }
    } else {
        zero(&base)
    };
    Ok(FFLUResult { rank, permutation: perm, u: DenseMatrix::from_rows(&base, w)?, det_value })
}

fn exact_or_impossible(a: &Elem, b: &Elem) -> Result<Elem> {
    match a.exact_div(b) {
        Ok(v) => Ok(v),
        Err(Error::InexactDivision) => {
            Err(Error::ImpossibleInverse(alloc::boxed::Box::new(b.clone())))
        }
        Err(e) => Err(e),
    }
}

// ---------------------------------------------------------------------------
// Determinants
// ---------------------------------------------------------------------------

/// Determinant dispatcher: interpolation over polynomial base rings, Bareiss
/// over integral domains, division-free Berkowitz elsewhere. Bareiss cannot
/// be trusted with zero divisors (an exact division by a zero divisor has
/// several solutions), so non-domains skip it rather than relying on errors.
pub fn det(m: &DenseMatrix) -> Result<Elem> {
    if m.nrows() != m.ncols() {
        return Err(Error::NonSquare);
    }
    if matches!(m.base().kind, RingKind::PolynomialRing { .. }) {
        return match det_interpolation(m) {
            Ok(v) => Ok(v),
            Err(Error::InsufficientPoints) => det_clow(m),
            Err(e) => Err(e),
        };
    }
    if !crate::ring::is_domain(m.base()) {
        return det_division_free(m);
    }
    match fflu(m) {
        Ok(r) => Ok(r.det_value),
        Err(Error::ImpossibleInverse(_)) => det_division_free(m),
        Err(e) => Err(e),
    }
}

/// Division-free determinant via Berkowitz: det = (-1)^n * charpoly(0).
pub fn det_division_free(m: &DenseMatrix) -> Result<Elem> {
    if m.nrows() != m.ncols() {
        return Err(Error::NonSquare);
    }
    let n = m.nrows();
    if n == 0 {
        return Ok(one(m.base()));
    }
    let chi = charpoly_berkowitz(m)?;
    let c0 = chi.coeffs.first().cloned().unwrap_or_else(|| zero(m.base()));
    Ok(if n % 2 == 1 { c0.neg() } else { c0 })
}

/// Determinant by the Mahajan-Vinay clow-sequence dynamic program: O(n^4)
/// ring operations, no divisions.
pub fn det_clow(m: &DenseMatrix) -> Result<Elem> {
    if m.nrows() != m.ncols() {
        return Err(Error::NonSquare);
    }
    let n = m.nrows();
    let base = m.base().clone();
    if n == 0 {
        return Ok(one(&base));
    }
    // f[c][u]: signed sum over partial clow sequences, current clow headed
    // at c standing at vertex u. Opening a clow contributes a factor -1.
    let mut f = vec![vec![zero(&base); n]; n];
    for c in 0..n {
        f[c][c] = one(&base).neg();
    }
    let mut t = zero(&base);
    for _ in 0..n - 1 {
        let mut g = vec![vec![zero(&base); n]; n];
        for c in 0..n {
            for u in c..n {
                if f[c][u].is_zero() {
                    continue;
                }
                // extend the current clow to a vertex above the head
                for wv in c + 1..n {
                    t.mul_into(&f[c][u], m.at(u, wv))?;
                    g[c][wv].add_assign_elem(&t)?;
                }
                // close at the head and open a new clow at a larger head
                let closed = f[c][u].mul(m.at(u, c))?;
                for h in c + 1..n {
                    g[h][h] = g[h][h].sub(&closed)?;
                }
            }
        }
        f = g;
    }
    let mut acc = zero(&base);
    for c in 0..n {
        for u in c..n {
            if f[c][u].is_zero() {
                continue;
            }
            t.mul_into(&f[c][u], m.at(u, c))?;
            acc.add_assign_elem(&t)?;
        }
    }
    Ok(if n % 2 == 1 { acc.neg() } else { acc })
}

/// Determinant over R[x] by evaluation and interpolation.
pub fn det_interpolation(m: &DenseMatrix) -> Result<Elem> {
    if m.nrows() != m.ncols() {
        return Err(Error::NonSquare);
    }
    let pring = m.base().clone();
    let RingKind::PolynomialRing { base: ref inner, .. } = pring.kind else {
        return Err(Error::InvalidParameter("det_interpolation needs a polynomial base ring".into()));
    };
    let n = m.nrows();
    if n == 0 {
        return Ok(one(&pring));
    }
    // degree bound: sum over rows of the maximum entry degree
    let mut bound = 0usize;
    for i in 0..n {
        let mut row_deg = 0usize;
        for j in 0..n {
            if let Repr::Dense(c) = &m.at(i, j).repr {
                row_deg = row_deg.max(c.len().saturating_sub(1));
            }
        }
        bound += row_deg;
    }
    let npoints = bound + 1;
    if let RingKind::IntegerResidue { modulus } = &inner.kind {
        if BigInt::from(npoints) > *modulus {
            return Err(Error::InsufficientPoints);
        }
    }
    // work over the fraction field when the inner ring is not a field, so
    // that Newton interpolation can divide freely
    let (work, lift): (Ring, bool) = if is_field(inner) {
        (inner.clone(), false)
    } else {
        (fraction_field(inner.clone()), true)
    };
    let embed = |x: &Elem| -> Result<Elem> {
        if lift {
            make_fraction(&work, inner, x.clone(), one(inner))
        } else {
            Ok(x.clone())
        }
    };
    let mut xs = Vec::with_capacity(npoints);
    let mut ys = Vec::with_capacity(npoints);
    for k in 0..npoints {
        let point_inner = coerce_i64(inner, k as i64)?;
        let point = embed(&point_inner)?;
        let mv = m.map_entries(&work, |e| {
            let c = match &e.repr {
                Repr::Dense(c) => c,
                _ => unreachable!(),
            };
            let embedded: Vec<Elem> = c.iter().map(&embed).collect::<Result<_>>()?;
            dense::dp_eval(&work, &embedded, &point)
        })?;
        let d = match fflu(&mv) {
            Ok(r) => r.det_value,
            Err(Error::ImpossibleInverse(_)) => det_division_free(&mv)?,
            Err(e) => return Err(e),
        };
        xs.push(point);
        ys.push(d);
    }
    let coeffs = dense::dp_interpolate(&work, &xs, &ys)?;
    let out: Vec<Elem> = if lift {
        coeffs
            .iter()
            .map(|c| {
                let (num, den) = frac_parts(c).expect("fraction representation");
                num.exact_div(den)
            })
            .collect::<Result<_>>()?
    } else {
        coeffs
    };
    Ok(Elem { ring: pring.clone(), repr: Repr::Dense(out) })
}

// ---------------------------------------------------------------------------
// Characteristic polynomials
// ---------------------------------------------------------------------------

fn charpoly_ring(base: &Ring) -> Ring {
    polynomial_ring(base.clone(), "T")
}

/// Berkowitz' division-free characteristic polynomial.
pub fn charpoly_berkowitz(m: &DenseMatrix) -> Result<DensePoly> {
    if m.nrows() != m.ncols() {
        return Err(Error::NonSquare);
    }
    let base = m.base().clone();
    let n = m.nrows();
    let tring = charpoly_ring(&base);
    if n == 0 {
        return Ok(DensePoly::from_coeffs(&tring, vec![one(&base)]));
    }
    // leading-first coefficient vector of the charpoly of the r x r leading
    // principal block, built by Toeplitz products
    let mut p: Vec<Elem> = vec![one(&base)];
    for r in 1..=n {
        let a = m.at(r - 1, r - 1).clone();
        // t_0 = 1, t_1 = -a, t_{i+2} = -(R . B^i . C)
        let mut toeplitz: Vec<Elem> = Vec::with_capacity(r + 1);
        toeplitz.push(one(&base));
        toeplitz.push(a.neg());
        if r > 1 {
            // v = C (the column above the pivot); iterate v <- B v
            let mut v: Vec<Elem> = (0..r - 1).map(|i| m.at(i, r - 1).clone()).collect();
            let mut t = zero(&base);
            for _ in 0..r - 1 {
                // R . v
                let mut dot = zero(&base);
                for (j, vj) in v.iter().enumerate() {
                    t.mul_into(m.at(r - 1, j), vj)?;
                    dot.add_assign_elem(&t)?;
                }
                toeplitz.push(dot.neg());
                // v <- B v
                let mut nv = Vec::with_capacity(r - 1);
                for i in 0..r - 1 {
                    let mut acc = zero(&base);
                    for (j, vj) in v.iter().enumerate() {
                        t.mul_into(m.at(i, j), vj)?;
                        acc.add_assign_elem(&t)?;
                    }
                    nv.push(acc);
                }
                v = nv;
            }
        }
        // p_new[i] = sum_j toeplitz[i - j] * p[j]
        let mut pnew: Vec<Elem> = Vec::with_capacity(r + 1);
        let mut t = zero(&base);
        for i in 0..=r {
            let mut acc = zero(&base);
            for (j, pj) in p.iter().enumerate() {
                if i >= j && i - j < toeplitz.len() {
                    t.mul_into(&toeplitz[i - j], pj)?;
                    acc.add_assign_elem(&t)?;
                }
            }
            pnew.push(acc);
        }
        p = pnew;
    }
    p.reverse(); // to exponent-indexed
    Ok(DensePoly::from_coeffs(&tring, p))
}

/// Hessenberg-form characteristic polynomial (field base ring).
pub fn charpoly_hessenberg(m: &DenseMatrix) -> Result<DensePoly> {
    if m.nrows() != m.ncols() {
        return Err(Error::NonSquare);
    }
    let base = m.base().clone();
    if !is_field(&base) {
        return Err(Error::ImpossibleInverse(alloc::boxed::Box::new(one(&base))));
    }
    let n = m.nrows();
    let tring = charpoly_ring(&base);
    if n == 0 {
        return Ok(DensePoly::from_coeffs(&tring, vec![one(&base)]));
    }
    let mut h = m.rows_vec();
    // reduce to upper Hessenberg by similarity transforms
    for k in 1..n.saturating_sub(1) {
        // pivot at h[k][k-1]
        if h[k][k - 1].is_zero() {
            if let Some(i) = (k + 1..n).find(|&i| !h[i][k - 1].is_zero()) {
                h.swap(k, i);
                for row in h.iter_mut() {
                    row.swap(k, i);
                }
            }
        }
        if h[k][k - 1].is_zero() {
            continue;
        }
        let pinv = h[k][k - 1].try_inverse()?;
        for i in k + 1..n {
            if h[i][k - 1].is_zero() {
                continue;
            }
            let u = h[i][k - 1].mul(&pinv)?;
            // row_i -= u * row_k
            for j in 0..n {
                let s = u.mul(&h[k][j])?;
                h[i][j] = h[i][j].sub(&s)?;
            }
            // col_k += u * col_i (inverse transform)
            for rrow in 0..n {
                let s = u.mul(&h[rrow][i])?;
                h[rrow][k] = h[rrow][k].add(&s)?;
            }
        }
    }
    // recurrence on leading principal minors of TI - H
    let mut p: Vec<Vec<Elem>> = Vec::with_capacity(n + 1);
    p.push(vec![one(&base)]); // p_0 = 1
    for mi in 1..=n {
        // p_m = (T - h[m-1][m-1]) p_{m-1} - sum_{i=1}^{m-1}
        //        h[m-1-i][m-1] * (prod_{j=m-i}^{m-1} h[j][j-1]) * p_{m-1-i}
        let shifted = dense::dp_shift(&p[mi - 1], 1, &base);
        let scaled = dense::dp_mul_scalar(&base, &p[mi - 1], &h[mi - 1][mi - 1])?;
        let mut pm = dense::dp_sub(&base, &shifted, &scaled)?;
        let mut prod = one(&base);
        for i in 1..mi {
            prod = prod.mul(&h[mi - i][mi - i - 1])?;
            if prod.is_zero() {
                break;
            }
            let coef = h[mi - 1 - i][mi - 1].mul(&prod)?;
            let term = dense::dp_mul_scalar(&base, &p[mi - 1 - i], &coef)?;
            pm = dense::dp_sub(&base, &pm, &term)?;
        }
        p.push(pm);
    }
    Ok(DensePoly::from_coeffs(&tring, p.pop().unwrap()))
}

/// Counters recorded by the fraction-free Danilevsky run.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DivisionStats {
    /// Exact divisions performed (each one asserted exact by `exact_div`).
    pub exact_divisions: u64,
    /// Similarity-preserving double swaps for zero pivots.
    pub swaps: u64,
    /// Block splits when a whole subrow vanished.
    pub blocks: u64,
    /// Divisions that failed to be exact. Always zero on success; a nonzero
    /// count only ever accompanies a `ZeroPivotUnresolvable` error.
    pub inexact_divisions: u64,
}

/// Fraction-free Danilevsky characteristic polynomial.
pub fn charpoly_danilevsky_ff(m: &DenseMatrix) -> Result<DensePoly> {
    Ok(charpoly_danilevsky_stats(m)?.0)
}

/// As `charpoly_danilevsky_ff` but also returns the instrumentation
/// counters.
pub fn charpoly_danilevsky_stats(m: &DenseMatrix) -> Result<(DensePoly, DivisionStats)> {
    if m.nrows() != m.ncols() {
        return Err(Error::NonSquare);
    }
    let base = m.base().clone();
    let tring = charpoly_ring(&base);
    let mut stats = DivisionStats::default();
    let w = m.rows_vec();
    let coeffs = danilevsky_block(&base, w, &one(&base), &mut stats)?;
    Ok((DensePoly::from_coeffs(&tring, coeffs), stats))
}

/// Charpoly of the matrix A/d given by numerators `a` and the scalar
/// denominator `d`; exponent-indexed coefficients.
fn danilevsky_block(
    base: &Ring,
    mut a: Vec<Vec<Elem>>,
    d0: &Elem,
    stats: &mut DivisionStats,
) -> Result<Vec<Elem>> {
    let n = a.len();
    if n == 0 {
        return Ok(vec![one(base)]);
    }
    if n == 1 {
        // T - a00/d
        let c = exact_div_count(&a[0][0], d0, stats)?;
        return Ok(vec![c.neg(), one(base)]);
    }
    let mut d = d0.clone();
    let mut k = n - 1;
    loop {
        // ensure a nonzero pivot at a[k][k-1]
        if a[k][k - 1].is_zero() {
            match (0..k - 1).rev().find(|&j| !a[k][j].is_zero()) {
                Some(j) => {
                    // similarity-preserving double swap of j and k-1
                    stats.swaps += 1;
                    a.swap(j, k - 1);
                    for row in a.iter_mut() {
                        row.swap(j, k - 1);
                    }
                }
                None => {
                    // whole subrow is zero: block split at k
                    stats.blocks += 1;
                    // bottom block rows k..n are already in companion form:
                    // charpoly = T^m - sum a[k][k+j]/d T^(m-1-j)
                    let mm = n - k;
                    let mut bottom = vec![zero(base); mm + 1];
                    bottom[mm] = one(base);
                    for j in 0..mm {
                        let c = exact_div_count(&a[k][k + j], &d, stats)?;
                        bottom[mm - 1 - j] = c.neg();
                    }
                    // recurse on the top-left k x k block with the same
                    // denominator
                    let top_rows: Vec<Vec<Elem>> =
                        a[..k].iter().map(|row| row[..k].to_vec()).collect();
                    let top = danilevsky_block(base, top_rows, &d, stats)?;
                    return dense::dp_mul(base, &top, &bottom);
                }
            }
        }
        let pivot = a[k][k - 1].clone();
        let row_k = a[k].clone();
        // pass 1: column operations, dividing out the previous denominator.
        // new[i][j] = (a[i][j]*pivot - a[i][k-1]*row_k[j]) / d  (j != k-1)
        // new[i][k-1] = a[i][k-1]
        let mut b: Vec<Vec<Elem>> = Vec::with_capacity(n);
        for i in 0..n {
            if i == k {
                // row k becomes pivot * e_{k-1} by construction
                let mut row = vec![zero(base); n];
                row[k - 1] = pivot.clone();
                b.push(row);
                continue;
            }
            let head = a[i][k - 1].clone();
            let mut row = Vec::with_capacity(n);
            for j in 0..n {
                if j == k - 1 {
                    row.push(head.clone());
                } else {
                    let t = a[i][j].mul(&pivot)?.sub(&head.mul(&row_k[j])?)?;
                    row.push(exact_div_count(&t, &d, stats)?);
                }
            }
            b.push(row);
        }
        // pass 2: replace row k-1 by row_k . B / d (the similarity's row
        // combination), dividing out the previous denominator again
        let mut newrow = Vec::with_capacity(n);
        let mut t = zero(base);
        for j in 0..n {
            let mut acc = zero(base);
            for (l, rl) in row_k.iter().enumerate() {
                if rl.is_zero() || b[l][j].is_zero() {
                    continue;
                }
                t.mul_into(rl, &b[l][j])?;
                acc.add_assign_elem(&t)?;
            }
            newrow.push(exact_div_count(&acc, &d, stats)?);
        }
        b[k - 1] = newrow;
        a = b;
        d = pivot;
        if k == 1 {
            break;
        }
        k -= 1;
    }
    // the matrix is now d * F where F has first row c and unit subdiagonal:
    // charpoly = T^n - sum_j c_j T^(n-1-j), c_j = a[0][j]/d
    let mut out = vec![zero(base); n + 1];
    out[n] = one(base);
    for j in 0..n {
        let c = exact_div_count(&a[0][j], &d, stats)?;
        out[n - 1 - j] = c.neg();
    }
    Ok(out)
}

fn exact_div_count(a: &Elem, d: &Elem, stats: &mut DivisionStats) -> Result<Elem> {
    if d.is_one() {
        return Ok(a.clone());
    }
    stats.exact_divisions += 1;
    match a.exact_div(d) {
        Ok(v) => Ok(v),
        Err(Error::InexactDivision) => {
            stats.inexact_divisions += 1;
            Err(Error::ZeroPivotUnresolvable)
        }
        Err(e) => Err(e),
    }
}

// ---------------------------------------------------------------------------
// Minimal polynomials
// ---------------------------------------------------------------------------

/// Echelonized record of the Krylov vectors found so far.
#[derive(Debug, Clone)]
pub struct KrylovBasis {
    /// Reduced rows (pivot entries normalized to 1).
    pub b: Vec<Vec<Elem>>,
    /// One pivot column per row.
    pub pivot_cols: Vec<usize>,
    /// Indices of the standard basis vectors that seeded a cycle.
    pub generators: Vec<usize>,
}

impl KrylovBasis {
    fn new() -> Self {
        KrylovBasis { b: Vec::new(), pivot_cols: Vec::new(), generators: Vec::new() }
    }

    /// Reduce `v` in place against the basis; returns true when v reduced
    /// to zero (i.e. was in the span).
    fn reduce(&self, v: &mut [Elem]) -> Result<bool> {
        for (row, &p) in self.b.iter().zip(self.pivot_cols.iter()) {
            if v[p].is_zero() {
                continue;
            }
            let f = v[p].clone();
            for (x, r) in v.iter_mut().zip(row.iter()) {
                let s = f.mul(r)?;
                *x = x.sub(&s)?;
            }
        }
        Ok(v.iter().all(Elem::is_zero))
    }

    /// Insert a vector (if independent), normalizing its pivot to 1.
    fn insert(&mut self, mut v: Vec<Elem>) -> Result<()> {
        if self.reduce(&mut v)? {
            return Ok(());
        }
        let p = v.iter().position(|x| !x.is_zero()).unwrap();
        let inv = v[p].try_inverse()?;
        for x in v.iter_mut() {
            *x = x.mul(&inv)?;
        }
        self.b.push(v);
        self.pivot_cols.push(p);
        Ok(())
    }
}

/// Minimal polynomial over a field by Krylov spinning: for each standard
/// basis vector not yet in the tracked span, spin the residual vector and
/// multiply in the local relation polynomial.
pub fn minpoly_field(m: &DenseMatrix) -> Result<DensePoly> {
    Ok(minpoly_field_with_basis(m)?.0)
}

pub fn minpoly_field_with_basis(m: &DenseMatrix) -> Result<(DensePoly, KrylovBasis)> {
    if m.nrows() != m.ncols() {
        return Err(Error::NonSquare);
    }
    let base = m.base().clone();
    let n = m.nrows();
    let tring = charpoly_ring(&base);
    let mut basis = KrylovBasis::new();
    let mut mp: Vec<Elem> = vec![one(&base)]; // current minpoly factor product
    for j in 0..n {
        if mp.len() > n {
            break;
        }
        let mut e = vec![zero(&base); n];
        e[j] = one(&base);
        // every basis row is annihilated by mp, so vectors in the span are
        // settled already
        {
            let mut probe = e.clone();
            if basis.reduce(&mut probe)? {
                continue;
            }
        }
        // w = mp(M) e_j via Horner matrix-vector products
        let w = eval_poly_vec(m, &mp, &e)?;
        if w.iter().all(Elem::is_zero) {
            continue;
        }
        basis.generators.push(j);
        let (q, cycle) = cyclic_minpoly(m, w)?;
        mp = dense::dp_mul(&base, &mp, &q)?;
        for v in cycle {
            basis.insert(v)?;
        }
    }
    Ok((DensePoly::from_coeffs(&tring, mp), basis))
}

/// p(M) v by Horner's rule using matrix-vector products only.
fn eval_poly_vec(m: &DenseMatrix, p: &[Elem], v: &[Elem]) -> Result<Vec<Elem>> {
    let base = m.base().clone();
    let n = v.len();
    let mut acc = vec![zero(&base); n];
    for c in p.iter().rev() {
        acc = m.mul_vec(&acc)?;
        if !c.is_zero() {
            for (i, vi) in v.iter().enumerate() {
                let s = c.mul(vi)?;
                acc[i] = acc[i].add(&s)?;
            }
        }
    }
    Ok(acc)
}

/// Monic minimal polynomial of the cyclic subspace generated by `w`, plus
/// the reduced cycle vectors. Tracks coordinates so that the first linear
/// dependence directly yields the relation polynomial.
fn cyclic_minpoly(m: &DenseMatrix, w: Vec<Elem>) -> Result<(Vec<Elem>, Vec<Vec<Elem>>)> {
    let base = m.base().clone();
    let mut rows: Vec<Vec<Elem>> = Vec::new();
    let mut pivots: Vec<usize> = Vec::new();
    let mut coords: Vec<Vec<Elem>> = Vec::new(); // row i as combo of k_0..k_j
    let mut k = w;
    let mut step = 0usize;
    loop {
        let mut v = k.clone();
        let mut coord = vec![zero(&base); step + 1];
        coord[step] = one(&base);
        for ((row, &p), rc) in rows.iter().zip(pivots.iter()).zip(coords.iter()) {
            if v[p].is_zero() {
                continue;
            }
            let f = v[p].clone();
            for (x, r) in v.iter_mut().zip(row.iter()) {
                let s = f.mul(r)?;
                *x = x.sub(&s)?;
            }
            for (c, r) in coord.iter_mut().zip(rc.iter()) {
                let s = f.mul(r)?;
                *c = c.sub(&s)?;
            }
        }
        if v.iter().all(Elem::is_zero) {
            // coord gives sum coord[t] k_t = 0 with coord[step] = 1: monic
            return Ok((coord, rows));
        }
        let p = v.iter().position(|x| !x.is_zero()).unwrap();
        let inv = v[p].try_inverse()?;
        for x in v.iter_mut() {
            *x = x.mul(&inv)?;
        }
        for c in coord.iter_mut() {
            *c = c.mul(&inv)?;
        }
        rows.push(v);
        pivots.push(p);
        coords.push(coord);
        k = m.mul_vec(&k)?;
        step += 1;
    }
}

/// Minimal polynomial over Z by Chinese remaindering of mod-p spinning
/// results, with the recorded-generator verification as the provably
/// correct termination test.
pub fn minpoly_integer(m: &DenseMatrix) -> Result<DensePoly> {
    if m.nrows() != m.ncols() {
        return Err(Error::NonSquare);
    }
    let zz = integers();
    if !rings_equal(m.base(), &zz) {
        return Err(Error::InvalidParameter("minpoly_integer expects an integer matrix".into()));
    }
    let n = m.nrows();
    let tring = charpoly_ring(&zz);
    if n == 0 {
        return Ok(DensePoly::from_coeffs(&tring, vec![one(&zz)]));
    }
    let mut primes = DescendingPrimes::new();
    // residues of the candidate coefficients and the combined modulus
    let mut state: Option<CrtState> = None;
    let mut generators: Vec<usize> = Vec::new();
    loop {
        let p = primes.next().expect("prime stream is unbounded in practice");
        let pring = integer_residue(BigInt::from(p))?;
        let mp_mat = m.map_entries(&pring, |e| {
            let v = match &e.repr {
                Repr::Int(v) => v,
                _ => unreachable!(),
            };
            coerce_int(&pring, v)
        })?;
        let (mp, basis) = minpoly_field_with_basis(&mp_mat)?;
        let deg = mp.coeffs.len().saturating_sub(1);
        let residues: Vec<BigInt> = mp
            .coeffs
            .iter()
            .map(|c| match &c.repr {
                Repr::Int(v) => v.clone(),
                _ => unreachable!(),
            })
            .collect();
        match &mut state {
            None => {
                generators = basis.generators.clone();
                state = Some(CrtState::new(residues, BigInt::from(p)));
            }
            Some(s) if deg < s.degree() => {} // bad prime, discard
            Some(s) if deg > s.degree() => {
                // all previous primes were bad
                generators = basis.generators.clone();
                state = Some(CrtState::new(residues, BigInt::from(p)));
            }
            Some(s) => {
                s.merge(&residues, &BigInt::from(p));
            }
        }
        let Some(s) = &state else { continue };
        if !s.stable {
            continue;
        }
        // candidate with symmetric lifting; verify m(M) v_i = 0 over Z for
        // the recorded generators
        let cand = s.symmetric_lift();
        let mut coeffs = Vec::with_capacity(cand.len());
        for c in &cand {
            coeffs.push(coerce_int(&zz, c)?);
        }
        let mut ok = true;
        for &j in &generators {
            let mut e = vec![zero(&zz); n];
            e[j] = one(&zz);
            let r = eval_poly_vec(m, &coeffs, &e)?;
            if !r.iter().all(Elem::is_zero) {
                ok = false;
                break;
            }
        }
        if ok {
            return Ok(DensePoly::from_coeffs(&tring, coeffs));
        }
    }
}

struct CrtState {
    residues: Vec<BigInt>,
    modulus: BigInt,
    /// Set when the symmetric lift did not change when the last prime was
    /// merged.
    stable: bool,
    last_lift: Vec<BigInt>,
}

impl CrtState {
    fn new(residues: Vec<BigInt>, modulus: BigInt) -> Self {
        let mut s = CrtState { residues, modulus, stable: false, last_lift: Vec::new() };
        s.last_lift = s.symmetric_lift();
        s
    }

    fn degree(&self) -> usize {
        self.residues.len().saturating_sub(1)
    }

    fn merge(&mut self, other: &[BigInt], p: &BigInt) {
        let m = &self.modulus;
        // inv = m^{-1} mod p
        let inv = modinv(m, p);
        for (r, o) in self.residues.iter_mut().zip(other.iter()) {
            // r' = r + m * ((o - r) * inv mod p)
            let mut delta = (o - &*r) % p;
            if delta.is_negative() {
                delta += p;
            }
            let t = (delta * &inv) % p;
            *r += m * t;
        }
        self.modulus = m * p;
        let lift = self.symmetric_lift();
        self.stable = lift == self.last_lift;
        self.last_lift = lift;
    }

    fn symmetric_lift(&self) -> Vec<BigInt> {
        let half = &self.modulus / 2;
        self.residues
            .iter()
            .map(|r| {
                let mut v = r % &self.modulus;
                if v.is_negative() {
                    v += &self.modulus;
                }
                if v > half {
                    v -= &self.modulus;
                }
                v
            })
            .collect()
    }
}

fn modinv(a: &BigInt, m: &BigInt) -> BigInt {
    // extended Euclid; m prime in our usage
    let (mut r0, mut r1) = (m.clone(), ((a % m) + m) % m);
    let (mut s0, mut s1) = (BigInt::zero(), BigInt::one());
    while !r1.is_zero() {
        let q = &r0 / &r1;
        let r = &r0 - &q * &r1;
        r0 = core::mem::replace(&mut r1, r);
        let s = &s0 - &q * &s1;
        s0 = core::mem::replace(&mut s1, s);
    }
    let mut inv = s0 % m;
    if inv.is_negative() {
        inv += m;
    }
    inv
}

/// Evaluate p at the matrix M (Horner with matrix products); used for
/// Cayley-Hamilton style checks.
pub fn eval_poly_at_matrix(p: &DensePoly, m: &DenseMatrix) -> Result<DenseMatrix> {
    let base = m.base().clone();
    let n = m.nrows();
    let mut acc = DenseMatrix::zero_matrix(&base, n, n);
    for c in p.coeffs.iter().rev() {
        acc = acc.mul(m)?;
        for i in 0..n {
            let idx = i * n + i;
            acc.entries[idx] = acc.entries[idx].add(c)?;
        }
    }
    Ok(acc)
}
