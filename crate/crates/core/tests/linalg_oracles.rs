//! Smith normal form and homology against independent oracles.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sharbly::exactlinalg::{elementary_divisors, homology_summands, smith_normal_form, IntMatrix};

/// Determinant of a small matrix by cofactor expansion.
fn det_cofactor(a: &[Vec<i64>]) -> i128 {
    let n = a.len();
    if n == 0 {
        return 1;
    }
    if n == 1 {
        return a[0][0] as i128;
    }
    let mut s = 0i128;
    for j in 0..n {
        if a[0][j] == 0 {
            continue;
        }
        let minor: Vec<Vec<i64>> = a[1..]
            .iter()
            .map(|r| r.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, &x)| x).collect())
            .collect();
        let sign = if j % 2 == 0 { 1 } else { -1 };
        s += sign * a[0][j] as i128 * det_cofactor(&minor);
    }
    s
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

/// Invariant factors from determinantal divisors: d_k = D_k / D_{k-1}.
fn invariant_factors_by_minors(a: &[Vec<i64>]) -> Vec<i128> {
    let m = a.len();
    let n = a[0].len();
    let mut prev = 1i128;
    let mut out = vec![];
    for k in 1..=m.min(n) {
        let mut g = 0i128;
        for rs in subsets(m, k) {
            for cs in subsets(n, k) {
                let sub: Vec<Vec<i64>> =
                    rs.iter().map(|&r| cs.iter().map(|&c| a[r][c]).collect()).collect();
                g = g.gcd(&det_cofactor(&sub));
            }
        }
        if g == 0 {
            break;
        }
        out.push(g / prev);
        prev = g;
    }
    out
}

/// Textbook Smith form without transforms: repeated Euclid on a dense copy.
fn textbook_invariant_factors(a: &[Vec<i64>]) -> Vec<BigInt> {
    let mut a: Vec<Vec<BigInt>> =
        a.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
    let m = a.len();
    let n = if m == 0 { 0 } else { a[0].len() };
    let mut diag = vec![];
    let mut t = 0;
    while t < m.min(n) {
        // Any nonzero entry as pivot.
        let Some((pi, pj)) = (t..m)
            .flat_map(|i| (t..n).map(move |j| (i, j)))
            .find(|&(i, j)| !a[i][j].is_zero())
        else {
            break;
        };
        a.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            let mut changed = false;
            for i in t + 1..m {
                while !a[i][t].is_zero() {
                    let q = a[i][t].div_floor(&a[t][t]);
                    for j in t..n {
                        let v = &a[t][j] * &q;
                        a[i][j] -= v;
                    }
                    if !a[i][t].is_zero() {
                        a.swap(t, i);
                    }
                    changed = true;
                }
            }
            for j in t + 1..n {
                while !a[t][j].is_zero() {
                    let q = a[t][j].div_floor(&a[t][t]);
                    for row in a.iter_mut().skip(t) {
                        let v = &row[t] * &q;
                        row[j] -= v;
                    }
                    if !a[t][j].is_zero() {
                        for row in a.iter_mut() {
                            row.swap(t, j);
                        }
                    }
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        diag.push(a[t][t].abs());
        t += 1;
    }
    // Normalize the diagonal to a divisibility chain.
    let k = diag.len();
    for i in 0..k {
        for j in i + 1..k {
            let g = diag[i].gcd(&diag[j]);
            let l = &diag[i] / &g * &diag[j];
            diag[i] = g;
            diag[j] = l;
        }
    }
    diag
}

fn random_sparse(rng: &mut ChaCha8Rng, rows: usize, cols: usize, density: f64, bound: i64) -> Vec<Vec<i64>> {
    (0..rows)
        .map(|_| {
            (0..cols)
                .map(|_| if rng.gen_bool(density) { rng.gen_range(-bound..=bound) } else { 0 })
                .collect()
        })
        .collect()
}

fn check_snf(a: &IntMatrix) {
    let r = smith_normal_form(a);
    assert_eq!(r.u.mul(&r.s).unwrap().mul(&r.v).unwrap(), *a, "U S V != A");
    assert!(r.u.det().unwrap().abs().is_one());
    assert!(r.v.det().unwrap().abs().is_one());
    let d = r.invariant_factors();
    for (i, x) in d.iter().enumerate() {
        assert!(x.is_positive());
        if i + 1 < d.len() {
            assert!(d[i + 1].is_multiple_of(x), "divisibility chain broken");
        }
    }
    for (row, col, _) in r.s.iter() {
        assert_eq!(row, col, "S not diagonal");
    }
}

#[test]
fn gcd_of_minors_oracle_up_to_six() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..150 {
        let n = rng.gen_range(1..=6);
        let a = random_sparse(&mut rng, n, n, 0.6, 9);
        let r = smith_normal_form(&IntMatrix::from_dense(&a));
        let got: Vec<i128> =
            r.invariant_factors().iter().map(|x| i128::try_from(x).unwrap()).collect();
        assert_eq!(got, invariant_factors_by_minors(&a), "{:?}", a);
        let det = det_cofactor(&a).abs();
        if det != 0 {
            assert_eq!(got.iter().product::<i128>(), det);
        }
    }
}

#[test]
fn sparse_divisors_agree_with_textbook() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..60 {
        let rows = rng.gen_range(1..=30);
        let cols = rng.gen_range(1..=30);
        let a = random_sparse(&mut rng, rows, cols, 0.15, 4);
        let (rank, divs) = elementary_divisors(&IntMatrix::from_dense(&a));
        let tb = textbook_invariant_factors(&a);
        assert_eq!(rank, tb.len());
        let tb: Vec<BigInt> = tb.into_iter().filter(|x| !x.is_one()).collect();
        assert_eq!(divs, tb);
    }
}

/// Random complexes `Z^25 -> Z^30 -> Z^20` with a hidden splitting of the
/// middle term, compared with the textbook algorithm.
#[test]
fn homology_agrees_with_textbook() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..10 {
        // Split Z^30 = A (dim 12) + B (dim 18); d_out kills B, d_in lands in B.
        let k = 12;
        let x = random_sparse(&mut rng, 20, k, 0.5, 3);
        let y = random_sparse(&mut rng, 30 - k, 25, 0.3, 3);
        let mut d_out = vec![vec![0i64; 30]; 20];
        for i in 0..20 {
            d_out[i][..k].copy_from_slice(&x[i]);
        }
        let mut d_in = vec![vec![0i64; 25]; 30];
        for i in k..30 {
            d_in[i] = y[i - k].clone();
        }
        // Mix the basis of Z^30 by a unimodular change so the split is hidden.
        let mut g = vec![vec![0i64; 30]; 30];
        for (i, row) in g.iter_mut().enumerate() {
            row[i] = 1;
            if i + 1 < 30 {
                row[i + 1] = rng.gen_range(-1..=1);
            }
        }
        let gi = IntMatrix::from_dense(&g);
        // d_out * g^{-1} and g * d_in; g^{-1} by back substitution.
        let g_inv = {
            let mut inv = vec![vec![0i64; 30]; 30];
            for c in 0..30 {
                let mut col = vec![0i64; 30];
                col[c] = 1;
                for i in (0..30).rev() {
                    let mut s = col[i];
                    for j in i + 1..30 {
                        s -= g[i][j] * inv[j][c];
                    }
                    inv[i][c] = s;
                }
            }
            IntMatrix::from_dense(&inv)
        };
        let dout = IntMatrix::from_dense(&d_out).mul(&g_inv).unwrap();
        let din = gi.mul(&IntMatrix::from_dense(&d_in)).unwrap();
        let (free, tors) = homology_summands(&din, &dout).unwrap();

        let to_i64 = |m: &IntMatrix| -> Vec<Vec<i64>> {
            m.to_dense().iter().map(|r| r.iter().map(|x| i64::try_from(x).unwrap()).collect()).collect()
        };
        let r_in = textbook_invariant_factors(&to_i64(&din));
        let r_out = textbook_invariant_factors(&to_i64(&dout));
        assert_eq!(free, 30 - r_in.len() - r_out.len());
        let expect: Vec<BigInt> = r_in.into_iter().filter(|x| !x.is_one()).collect();
        assert_eq!(tors, expect);
    }
}

#[test]
fn homology_invariant_under_permutation() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..20 {
        let d_in = random_sparse(&mut rng, 15, 10, 0.3, 3);
        let d_out = vec![vec![0i64; 15]; 4];
        let base = homology_summands(&IntMatrix::from_dense(&d_in), &IntMatrix::from_dense(&d_out)).unwrap();
        let mut perm: Vec<usize> = (0..15).collect();
        for i in (1..15).rev() {
            perm.swap(i, rng.gen_range(0..=i));
        }
        let mut cperm: Vec<usize> = (0..10).collect();
        for i in (1..10).rev() {
            cperm.swap(i, rng.gen_range(0..=i));
        }
        let permuted: Vec<Vec<i64>> =
            perm.iter().map(|&r| cperm.iter().map(|&c| d_in[r][c]).collect()).collect();
        let again =
            homology_summands(&IntMatrix::from_dense(&permuted), &IntMatrix::from_dense(&d_out)).unwrap();
        assert_eq!(base, again);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn snf_invariants_hold(rows in 1usize..12, cols in 1usize..12, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_sparse(&mut rng, rows, cols, 0.4, 20);
        check_snf(&IntMatrix::from_dense(&a));
    }

    #[test]
    fn text_format_round_trips(rows in 0usize..8, cols in 0usize..8, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = if rows == 0 || cols == 0 {
            IntMatrix::zero(rows, cols)
        } else {
            IntMatrix::from_dense(&random_sparse(&mut rng, rows, cols, 0.3, 1000))
        };
        prop_assert_eq!(IntMatrix::from_text(&a.to_text()).unwrap(), a);
    }
}
