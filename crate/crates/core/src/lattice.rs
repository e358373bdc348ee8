//! Integer lattice kernels used by the subgroup machinery.
//!
//! Every lattice handled here contains `diag(moduli)·Z^k`, so entries can be
//! kept reduced modulo the column modulus at all times. That keeps every
//! intermediate value below `max(moduli)^2`, well inside `i64`.

/// Hermite normal form of the lattice spanned by `rows` together with
/// `moduli[c]·e_c` for every column `c`.
///
/// Returns a `k×k` upper triangular basis with positive diagonal entries that
/// divide the corresponding modulus, and off-diagonal entries reduced into
/// `[0, pivot)`. The result is unique for a given lattice.
pub(crate) fn hnf_mod(rows: &[Vec<i64>], moduli: &[i64]) -> Vec<Vec<i64>> {
    let k = moduli.len();
    let mut active: Vec<Vec<i64>> = rows
        .iter()
        .map(|r| {
            debug_assert_eq!(r.len(), k);
            r.iter().zip(moduli).map(|(&x, &m)| x.rem_euclid(m)).collect()
        })
        .filter(|r: &Vec<i64>| r.iter().any(|&x| x != 0))
        .collect();
    let mut basis: Vec<Vec<i64>> = Vec::with_capacity(k);

    for c in 0..k {
        let mut unit = vec![0; k];
        unit[c] = moduli[c];
        active.push(unit);

        // Euclid on column c until a single row carries a nonzero entry.
        loop {
            let mut best: Option<usize> = None;
            for (idx, row) in active.iter().enumerate() {
                if row[c] != 0 && best.is_none_or(|b| row[c].abs() < active[b][c].abs()) {
                    best = Some(idx);
                }
            }
            let b = best.expect("modulus row keeps the column nonzero");
            let pivot = active[b].clone();
            let mut done = true;
            for (idx, row) in active.iter_mut().enumerate() {
                if idx == b || row[c] == 0 {
                    continue;
                }
                let q = row[c].div_euclid(pivot[c]);
                for j in c..k {
                    row[j] = (row[j] - q * pivot[j]).rem_euclid(moduli[j]);
                }
                // rem_euclid on column c may leave a positive remainder.
                if row[c] != 0 {
                    done = false;
                }
            }
            if done {
                let mut pivot = active.swap_remove(b);
                if pivot[c] < 0 {
                    for x in pivot.iter_mut() {
                        *x = -*x;
                    }
                }
                for j in c + 1..k {
                    pivot[j] = pivot[j].rem_euclid(moduli[j]);
                }
                basis.push(pivot);
                break;
            }
        }
        active.retain(|r| r.iter().any(|&x| x != 0));
    }

    // Reduce entries above each pivot.
    for c in 0..k {
        let d = basis[c][c];
        for i in 0..c {
            let q = basis[i][c].div_euclid(d);
            if q != 0 {
                for j in c..k {
                    basis[i][j] -= q * basis[c][j];
                }
            }
        }
    }
    basis
}

/// Reduces `x` against an upper triangular basis produced by [`hnf_mod`].
/// Returns `true` when `x` lies in the lattice.
pub(crate) fn lattice_contains(basis: &[Vec<i64>], moduli: &[i64], x: &[i64]) -> bool {
    let k = moduli.len();
    let mut r: Vec<i64> = x.iter().zip(moduli).map(|(&v, &m)| v.rem_euclid(m)).collect();
    for c in 0..k {
        let d = basis[c][c];
        if r[c] % d != 0 {
            return false;
        }
        let q = r[c] / d;
        if q != 0 {
            for j in c..k {
                r[j] = (r[j] - q * basis[c][j]).rem_euclid(moduli[j]);
            }
        }
    }
    r.iter().all(|&v| v == 0)
}

/// Coordinates of `x` in the basis `basis`, reduced modulo `exp_mod`.
///
/// `x` must lie in the lattice spanned by `basis` (no moduli reduction is
/// applied to `x`; the caller passes an actual lattice vector).
pub(crate) fn coordinates(basis: &[Vec<i64>], x: &[i64], exp_mod: i128) -> Option<Vec<i64>> {
    let k = x.len();
    let mut r: Vec<i128> = x.iter().map(|&v| v as i128).collect();
    let mut u = vec![0i64; k];
    for c in 0..k {
        let d = basis[c][c] as i128;
        if r[c].rem_euclid(d) != 0 {
            return None;
        }
        let q = r[c] / d;
        u[c] = q.rem_euclid(exp_mod) as i64;
        if q != 0 {
            for j in c..k {
                r[j] -= q * basis[c][j] as i128;
            }
        }
    }
    Some(u)
}

/// Solutions `x ∈ Z^k` of `Σ_j eqs[t][j]·x_j ≡ 0 (mod eq_moduli[t])` for every
/// equation `t`, returned as the HNF basis of the kernel lattice.
///
/// Each equation must define a homomorphism on `⊕ Z/moduli[j]`, i.e.
/// `eqs[t][j]·moduli[j] ≡ 0 (mod eq_moduli[t])`.
pub(crate) fn kernel_mod(eqs: &[Vec<i64>], eq_moduli: &[i64], moduli: &[i64]) -> Vec<Vec<i64>> {
    let k = moduli.len();
    let g = eqs.len();
    if g == 0 {
        let units: Vec<Vec<i64>> = (0..k).map(|j| (0..k).map(|i| i64::from(i == j)).collect()).collect();
        return hnf_mod(&units, moduli);
    }
    let mut ext_moduli: Vec<i64> = eq_moduli.to_vec();
    ext_moduli.extend_from_slice(moduli);
    let rows: Vec<Vec<i64>> = (0..k)
        .map(|j| {
            let mut row = vec![0i64; g + k];
            for t in 0..g {
                debug_assert_eq!(
                    (eqs[t][j] as i128 * moduli[j] as i128).rem_euclid(eq_moduli[t] as i128),
                    0
                );
                row[t] = eqs[t][j];
            }
            row[g + j] = 1;
            row
        })
        .collect();
    let ext = hnf_mod(&rows, &ext_moduli);
    // Rows whose pivot lies in the variable block have a zero equation part.
    let kernel_rows: Vec<Vec<i64>> = ext[g..].iter().map(|r| r[g..].to_vec()).collect();
    hnf_mod(&kernel_rows, moduli)
}

/// Invariant factors (as p-adic valuations) of `(Z/p^e)^k / rowspan(m)`,
/// computed as a Smith normal form over the local ring `Z/p^e`.
///
/// Zero diagonal entries contribute `e`; trivial factors are dropped and the
/// result is sorted in non-increasing order.
pub(crate) fn local_snf(m: &[Vec<i64>], k: usize, p: i64, e: u32) -> Vec<u32> {
    if e == 0 {
        return Vec::new();
    }
    let modulus = p.pow(e) as i128;
    let mut a: Vec<Vec<i128>> = m
        .iter()
        .map(|r| r.iter().map(|&x| (x as i128).rem_euclid(modulus)).collect())
        .collect();
    let rows = a.len();
    let mut out = Vec::with_capacity(k);
    let mut row0 = 0usize;
    for col0 in 0..k {
        // Pivot: entry of minimal valuation in the remaining block.
        let mut best: Option<(usize, usize, u32)> = None;
        for i in row0..rows {
            for j in col0..k {
                if a[i][j] != 0 {
                    let v = val_i128(a[i][j], p as i128);
                    if best.is_none_or(|(_, _, bv)| v < bv) {
                        best = Some((i, j, v));
                    }
                }
            }
        }
        let Some((bi, bj, v)) = best else {
            // Remaining columns are free: each contributes Z/p^e.
            out.extend(std::iter::repeat_n(e, k - col0));
            break;
        };
        a.swap(row0, bi);
        for r in a.iter_mut() {
            r.swap(col0, bj);
        }
        let pv = (p as i128).pow(v);
        let unit = a[row0][col0] / pv;
        let inv = mod_inverse(unit.rem_euclid(modulus), modulus);
        for x in a[row0].iter_mut() {
            *x = (*x * inv).rem_euclid(modulus);
        }
        // Now a[row0][col0] == p^v; clear its column and row.
        for i in 0..rows {
            if i != row0 && a[i][col0] != 0 {
                let q = a[i][col0] / pv;
                for j in col0..k {
                    a[i][j] = (a[i][j] - q * a[row0][j]).rem_euclid(modulus);
                }
            }
        }
        for j in col0 + 1..k {
            a[row0][j] = 0;
        }
        out.push(v);
        row0 += 1;
        if row0 == rows {
            out.extend(std::iter::repeat_n(e, k - col0 - 1));
            break;
        }
    }
    out.retain(|&x| x > 0);
    out.sort_unstable_by(|a, b| b.cmp(a));
    out
}

fn val_i128(mut x: i128, p: i128) -> u32 {
    let mut v = 0;
    while x % p == 0 {
        x /= p;
        v += 1;
    }
    v
}

fn mod_inverse(a: i128, m: i128) -> i128 {
    let (mut old_r, mut r) = (a, m);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    debug_assert_eq!(old_r, 1, "not a unit");
    old_s.rem_euclid(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hnf_of_single_generator() {
        // (Z/4)^2 with generator (2,1).
        let b = hnf_mod(&[vec![2, 1]], &[4, 4]);
        assert_eq!(b, vec![vec![2, 1], vec![0, 2]]);
        assert!(lattice_contains(&b, &[4, 4], &[2, 1]));
        assert!(lattice_contains(&b, &[4, 4], &[0, 2]));
        assert!(!lattice_contains(&b, &[4, 4], &[1, 0]));
        let det: i64 = (0..2).map(|i| b[i][i]).product();
        assert_eq!(16 / det, 4);
    }

    #[test]
    fn kernel_of_single_equation() {
        // {(x, y) in (Z/4)^2 : 2x ≡ 0 mod 4}
        let b = kernel_mod(&[vec![2, 0]], &[4], &[4, 4]);
        let det: i64 = (0..2).map(|i| b[i][i]).product();
        assert_eq!(16 / det, 8);
        assert!(lattice_contains(&b, &[4, 4], &[2, 3]));
        assert!(!lattice_contains(&b, &[4, 4], &[1, 0]));
    }

    #[test]
    fn local_snf_basic() {
        // Z^2 / <(2,1),(0,4)> ≅ Z/8
        assert_eq!(local_snf(&[vec![2, 1], vec![0, 4]], 2, 2, 3), vec![3]);
        // Z^2 / <(2,0),(0,4)> ≅ Z/4 ⊕ Z/2
        assert_eq!(local_snf(&[vec![2, 0], vec![0, 4]], 2, 2, 3), vec![2, 1]);
        assert_eq!(local_snf(&[], 2, 3, 0), Vec::<u32>::new());
    }
}
