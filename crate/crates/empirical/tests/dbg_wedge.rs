use dioph_empirical::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn wedge_matrix(params: &[f64]) -> MatF {
    let u = |i: usize| [params[3 * i], params[3 * i + 1], params[3 * i + 2]];
    let cross = |a: [f64; 3], b: [f64; 3]| {
        [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
    };
    let mut cols = Vec::new();
    for i in 0..4 {
        for j in (i + 1)..4 {
            cols.push(cross(u(i), u(j)));
        }
    }
    MatF::from_rows((0..3).map(|r| cols.iter().map(|c| c[r]).collect()).collect())
}

#[test]
fn dbg_wedge_brute() {
    let mut rng = ChaCha8Rng::seed_from_u64(1 ^ 0x0a00);
    let qv = QuasiNormF::unweighted(6);
    let qe = QuasiNormF::unweighted(3);
    let mut all = Vec::new();
    for _ in 0..5 {
        let params: Vec<f64> = (0..12).map(|_| rng.random_range(-1.0..1.0)).collect();
        all.push(wedge_matrix(&params));
    }
    // Point index 4 had the long plateau; brute force it at Q = 24.
    let x = &all[4];
    let q = 24.0;
    let fast = min_image_qnorm(x, &qv, &qe, q, Exec::Auto).unwrap();
    let b = 24i64;
    let mut brute = f64::INFINITY;
    let mut arg = vec![0i64; 6];
    let mut v = [0i64; 6];
    for a0 in -b..=b { v[0]=a0;
    for a1 in -b..=b { v[1]=a1;
    for a2 in -b..=b { v[2]=a2;
    for a3 in -b..=b { v[3]=a3;
    for a4 in -b..=b { v[4]=a4;
    for a5 in -b..=b { v[5]=a5;
        if v.iter().any(|&t| t != 0) {
            let w = x.mul_ints(&v);
            let val = w[0].abs().max(w[1].abs()).max(w[2].abs());
            if val < brute { brute = val; arg = v.to_vec(); }
        }
    }}}}}}
    println!("fast {:.6e} brute {:.6e} arg {:?} fast_arg {:?}", fast.value, brute, arg, fast.argmin);
    assert!((fast.value - brute).abs() <= 1e-12 * (1.0 + brute));
    println!("AGREE");
    panic!("inspect");
}
