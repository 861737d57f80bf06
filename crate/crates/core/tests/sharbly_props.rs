use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sharbly::lattice::{SquareMatrix, Vector};
use sharbly::sharbly::{normalize, ModP, SharblyChain};

fn random_vector(rng: &mut ChaCha8Rng, m: usize) -> Vector {
    loop {
        let v: Vector = (0..m).map(|_| rng.gen_range(-3..=3)).collect();
        if v.iter().any(|&x| x != 0) {
            return v;
        }
    }
}

fn random_chain(rng: &mut ChaCha8Rng, m: usize, degree: usize) -> SharblyChain<BigInt> {
    let mut c = SharblyChain::zero(m, degree);
    for _ in 0..rng.gen_range(1..6) {
        let vs: Vec<Vector> = (0..m + degree).map(|_| random_vector(rng, m)).collect();
        c.add_vectors(&vs, BigInt::from(rng.gen_range(-5..=5))).unwrap();
    }
    c
}

fn random_unimodular(rng: &mut ChaCha8Rng, m: usize) -> SquareMatrix {
    let mut g = SquareMatrix::identity(m);
    for _ in 0..8 {
        let (i, j) = (rng.gen_range(0..m), rng.gen_range(0..m));
        if i == j {
            g.negate_row(i);
            continue;
        }
        let mut e = SquareMatrix::identity(m);
        e.set(i, j, rng.gen_range(-2..=2));
        g = g.mul(&e);
    }
    g
}

#[test]
fn boundary_squares_to_zero() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut nontrivial = 0;
    for trial in 0..200 {
        let m = 2 + trial % 3;
        let c = random_chain(&mut rng, m, 2);
        let d = c.boundary().unwrap();
        if !d.is_zero() {
            nontrivial += 1;
        }
        assert!(d.boundary().unwrap().is_zero(), "d^2 != 0 on {}", c.to_text());
    }
    assert!(nontrivial > 100);
}

#[test]
fn boundary_commutes_with_action() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for trial in 0..120 {
        let m = 2 + trial % 3;
        let c = random_chain(&mut rng, m, 1 + trial % 2);
        let g = random_unimodular(&mut rng, m);
        let lhs = c.act(&g).unwrap().boundary().unwrap();
        let rhs = c.boundary().unwrap().act(&g).unwrap();
        assert_eq!(lhs, rhs);
    }
}

#[test]
fn mod_p_coefficients() {
    let p = 5;
    let mut c = SharblyChain::zero(2, 1);
    let vs = vec![vec![1, 0], vec![0, 1], vec![1, 1]];
    c.add_vectors(&vs, ModP::new(3, p)).unwrap();
    c.add_vectors(&vs, ModP::new(2, p)).unwrap();
    assert!(c.is_zero());
    c.add_vectors(&vs, ModP::new(1, p)).unwrap();
    assert!(c.boundary().unwrap().boundary().is_err());
    assert_eq!(c.boundary().unwrap().len(), 3);
}

#[test]
fn normalization_is_alternating() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let vs: Vec<Vector> = (0..4).map(|_| random_vector(&mut rng, 3)).collect();
        let mut swapped = vs.clone();
        swapped.swap(0, 2);
        let a = normalize(&vs).unwrap();
        let b = normalize(&swapped).unwrap();
        match (a, b) {
            (None, None) => {}
            (Some((s, x)), Some((t, y))) => {
                assert_eq!(s, t);
                assert_eq!(x, -y);
            }
            _ => panic!("zero-ness changed under a swap"),
        }
    }
}
