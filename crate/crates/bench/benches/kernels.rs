use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use quatlink::channel::{add_noise, convolve, gen_random_channel};
use quatlink::linalg::{solve, QMatrix};
use quatlink::wiener::{estimate_statistics, solve_wiener_default};
use quatlink::{run_qlms, Quaternion, SeededRng};

fn rq(rng: &mut SeededRng) -> Quaternion {
    Quaternion::new(rng.standard_normal(), rng.standard_normal(), rng.standard_normal(), rng.standard_normal())
}

fn link(n: usize) -> (Vec<Quaternion>, Vec<Quaternion>) {
    let mut rng = SeededRng::new(5);
    let channel = gen_random_channel(&mut rng, 4, true).unwrap();
    let tx: Vec<Quaternion> = rng.symbols(n).into_iter().map(Quaternion::from).collect();
    let mut rx = convolve(&tx, &channel.taps).unwrap();
    add_noise(&mut rx, 0.01, &mut rng).unwrap();
    (rx, tx)
}

fn quaternion_mul(c: &mut Criterion) {
    let mut rng = SeededRng::new(1);
    let (a, b) = (rq(&mut rng), rq(&mut rng));
    c.bench_function("hamilton_product", |bench| bench.iter(|| black_box(a) * black_box(b)));
}

fn solve_15(c: &mut Criterion) {
    let mut rng = SeededRng::new(2);
    let a = QMatrix::from_fn(15, 15, |r, col| {
        let q = rq(&mut rng);
        if r == col { q + Quaternion::from_real(15.0) } else { q }
    });
    let b: Vec<_> = (0..15).map(|_| rq(&mut rng)).collect();
    c.bench_function("solve_15x15", |bench| bench.iter(|| solve(black_box(&a), black_box(&b)).unwrap()));
}

fn qlms_block(c: &mut Criterion) {
    let (rx, tx) = link(5000);
    c.bench_function("qlms_5000_L15", |bench| bench.iter(|| run_qlms(black_box(&rx), &tx, 15, 0.01, 7).unwrap()));
}

fn wiener_block(c: &mut Criterion) {
    let (rx, tx) = link(5000);
    c.bench_function("wiener_5000_L15", |bench| {
        bench.iter(|| {
            let p = estimate_statistics(black_box(&rx), &tx, 15, 7).unwrap();
            solve_wiener_default(&p).unwrap()
        })
    });
}

criterion_group!(benches, quaternion_mul, solve_15, qlms_block, wiener_block);
criterion_main!(benches);
