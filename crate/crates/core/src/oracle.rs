//! Independent brute-force reference implementations.
//!
//! Everything here is written in the most direct style possible and shares
//! no code with the decomposition engines it validates — independence is the
//! entire point. These functions are the ground truth for the acceptance
//! suite and for the CLI's `--oracle` mode. Performance is a non-goal; each
//! operation enforces an explicit size budget instead.

use crate::tensor::{Scalar, SparseTensor};
use crate::zonotopes::ZonotopeSystem;
use num::{BigInt, BigRational, One, Signed, Zero};
use thiserror::Error;

/// A brute-force computation was asked to exceed its enumeration budget.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("permanent oracle supports n ≤ 30, got n = {0}")]
    PermanentTooLarge(usize),
    #[error("bijection-enumeration oracle supports n ≤ 7 and d ≤ 3, got n = {n}, d = {d}")]
    EnumerationTooLarge { n: usize, d: usize },
    #[error("mixed-volume oracle budget exceeded: {0} generator choices")]
    MixedVolumeTooLarge(u128),
    #[error("oracle requires a square input")]
    NotSquare,
}

/// Exact permanent by Ryser's inclusion–exclusion over column subsets,
/// with the subsets walked in Gray-code order so each step updates the row
/// sums by a single column flip. `O(n·2^n)`; capped at n = 30.
pub fn ryser_permanent<R: Scalar>(m: &SparseTensor<R>) -> Result<R, OracleError> {
    assert_eq!(m.order(), 2, "ryser_permanent takes a matrix");
    if !m.is_square() {
        return Err(OracleError::NotSquare);
    }
    let n = m.lens()[0];
    if n > 30 {
        return Err(OracleError::PermanentTooLarge(n));
    }
    if n == 0 {
        return Ok(R::one());
    }
    // Column-major nonzero lists for O(nnz(column)) flips.
    let mut cols: Vec<Vec<(usize, &R)>> = vec![Vec::new(); n];
    for (idx, v) in m.iter() {
        cols[idx[1]].push((idx[0], v));
    }
    // Perm(M) = (−1)^n · Σ_{S ⊆ columns} (−1)^{|S|} · Π_a Σ_{x∈S} M_{a,x}.
    let mut row_sums = vec![R::zero(); n];
    let mut in_set = vec![false; n];
    let mut set_size = 0usize;
    let mut total = R::zero();
    for k in 1u64..(1u64 << n) {
        // Gray code: step k flips the bit at trailing_zeros(k).
        let bit = k.trailing_zeros() as usize;
        if in_set[bit] {
            for (a, v) in &cols[bit] {
                row_sums[*a].sub_assign_ref(v);
            }
            in_set[bit] = false;
            set_size -= 1;
        } else {
            for (a, v) in &cols[bit] {
                row_sums[*a].add_assign_ref(v);
            }
            in_set[bit] = true;
            set_size += 1;
        }
        if row_sums.iter().any(|s| s.is_zero()) {
            continue;
        }
        let mut prod = row_sums[0].clone();
        for s in &row_sums[1..] {
            prod = prod.mul_ref(s);
        }
        if (n - set_size) % 2 == 1 {
            total.sub_assign_ref(&prod);
        } else {
            total.add_assign_ref(&prod);
        }
    }
    Ok(total)
}

/// Exact generalized matrix function of a square order-(d+1) tensor by
/// enumerating all d-tuples of bijections `π_l : A → X^l`:
///
/// `F(M) = Σ_{π_1..π_d} Π_{l signed} sgn(π_l) · Π_a M_{a, π_1(a), …, π_d(a)}`
///
/// with `sgn` computed by direct `O(n²)` inversion counting. `signed[l]`
/// says whether axis `l+1` contributes its sign. Budget `(n!)^d`, capped at
/// n ≤ 7, d ≤ 3.
pub fn naive_generalized<R: Scalar>(
    t: &SparseTensor<R>,
    signed: &[bool],
) -> Result<R, OracleError> {
    let d = t.order() - 1;
    assert_eq!(signed.len(), d, "one signedness flag per free axis");
    if !t.is_square() {
        return Err(OracleError::NotSquare);
    }
    let n = t.lens()[0];
    if n > 7 || d > 3 {
        return Err(OracleError::EnumerationTooLarge { n, d });
    }
    // Dense mixed-radix copy for O(1) entry lookup.
    let mut dense = vec![R::zero(); n.pow((d + 1) as u32)];
    for (idx, v) in t.iter() {
        let mut flat = 0usize;
        for &i in idx {
            flat = flat * n + i;
        }
        dense[flat] = v.clone();
    }

    fn inversions(p: &[usize]) -> usize {
        let mut c = 0;
        for i in 0..p.len() {
            for j in i + 1..p.len() {
                if p[i] > p[j] {
                    c += 1;
                }
            }
        }
        c
    }

    // All permutations of 0..n, each with its sign.
    let mut perms: Vec<(Vec<usize>, bool)> = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    loop {
        perms.push((cur.clone(), inversions(&cur) % 2 == 1));
        // Next lexicographic permutation.
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| cur[i] < cur[i + 1]) else {
            break;
        };
        let j = (i + 1..n).rev().find(|&j| cur[j] > cur[i]).unwrap();
        cur.swap(i, j);
        cur[i + 1..].reverse();
    }

    let mut total = R::zero();
    let mut choice = vec![0usize; d];
    loop {
        // Product over rows; bail out on the first zero factor.
        let mut prod = R::one();
        let mut zero = false;
        for a in 0..n {
            let mut flat = a;
            for l in 0..d {
                flat = flat * n + perms[choice[l]].0[a];
            }
            let v = &dense[flat];
            if v.is_zero() {
                zero = true;
                break;
            }
            prod = prod.mul_ref(v);
        }
        if !zero {
            let neg = (0..d).filter(|&l| signed[l] && perms[choice[l]].1).count() % 2 == 1;
            if neg {
                total.sub_assign_ref(&prod);
            } else {
                total.add_assign_ref(&prod);
            }
        }
        // Next choice tuple (mixed radix over d digits of base n!).
        let mut l = 0;
        loop {
            if l == d {
                return Ok(total);
            }
            choice[l] += 1;
            if choice[l] < perms.len() {
                break;
            }
            choice[l] = 0;
            l += 1;
        }
    }
}

/// Exact determinant of a dense rational matrix by fraction-free Bareiss
/// elimination: each row is first scaled to integers (tracking the scale
/// product), then the integer core runs division-free except for the exact
/// Bareiss divisions.
pub fn exact_determinant(rows: &[Vec<BigRational>]) -> BigRational {
    let n = rows.len();
    for r in rows {
        assert_eq!(r.len(), n, "exact_determinant takes a square matrix");
    }
    if n == 0 {
        return BigRational::one();
    }
    // Clear denominators row by row.
    let mut scale = BigInt::one();
    let mut a: Vec<Vec<BigInt>> = Vec::with_capacity(n);
    for row in rows {
        let mut lcm = BigInt::one();
        for v in row {
            lcm = num::integer::lcm(lcm, v.denom().clone());
        }
        a.push(row.iter().map(|v| v.numer() * (&lcm / v.denom())).collect());
        scale *= lcm;
    }
    // Bareiss: a[i][j] ← (a[i][j]·a[k][k] − a[i][k]·a[k][j]) / prev, exact.
    let mut sign = 1i64;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return BigRational::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = num / &prev;
            }
            a[i][k] = BigInt::zero();
        }
        prev = a[k][k].clone();
    }
    let det_int = if sign < 0 { -a[n - 1][n - 1].clone() } else { a[n - 1][n - 1].clone() };
    BigRational::new(det_int, scale)
}

/// Exact mixed volume by the defining sum: one `|det|` per choice of a
/// generator from each zonotope. Budget `Π |J_i| ≤ 10^6`.
pub fn naive_mixed_volume(zs: &ZonotopeSystem) -> Result<BigRational, OracleError> {
    let n = zs.dim();
    let mut count: u128 = 1;
    for z in zs.zonotopes() {
        count = count.saturating_mul(z.len() as u128);
    }
    if count > 1_000_000 {
        return Err(OracleError::MixedVolumeTooLarge(count));
    }
    if zs.zonotopes().len() != n {
        return Err(OracleError::NotSquare);
    }
    let mut total = BigRational::zero();
    let mut choice = vec![0usize; n];
    loop {
        let mat: Vec<Vec<BigRational>> = (0..n)
            .map(|i| zs.zonotopes()[i][choice[i]].clone())
            .collect();
        total += exact_determinant(&mat).abs();
        let mut i = 0;
        loop {
            if i == n {
                return Ok(total);
            }
            choice[i] += 1;
            if choice[i] < zs.zonotopes()[i].len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}
