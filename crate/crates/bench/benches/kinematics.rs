use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use qca_dsr::kinematics::{
    boost_jacobian, deformed_boost, dispersion, dmap, dmap_inverse, measure_density,
    standard_boost, Boost, MassParam, PseudoEnergyMomentum, Region,
};
use qca_dsr::wavepackets::spacetime_boost_matrix;

fn grid(n: usize) -> Vec<f64> {
    (0..n).map(|i| -3.1 + 6.2 * i as f64 / n as f64).collect()
}

fn kinematics(c: &mut Criterion) {
    let mass = MassParam::new(0.3).unwrap();
    let boost = Boost::new(-0.7).unwrap();
    let ks = grid(1024);

    c.bench_function("deformed_boost/1024", |b| {
        b.iter(|| {
            ks.iter()
                .map(|&k| deformed_boost(dispersion(k, mass), boost, mass).k)
                .sum::<f64>()
        })
    });
    c.bench_function("composition/1024", |b| {
        b.iter(|| {
            ks.iter()
                .map(|&k| {
                    let p = dispersion(k, mass);
                    let ep = dmap(p.omega, p.k).unwrap();
                    let (e, q) = standard_boost(ep.e, ep.p, boost);
                    dmap_inverse(PseudoEnergyMomentum { e, p: q }, Region::of(k))
                        .unwrap()
                        .1
                })
                .sum::<f64>()
        })
    });
    c.bench_function("measure_and_jacobian/1024", |b| {
        b.iter(|| {
            ks.iter()
                .map(|&k| measure_density(k, mass) * boost_jacobian(k, boost, mass))
                .sum::<f64>()
        })
    });
    c.bench_function("spacetime_boost_matrix", |b| {
        b.iter(|| spacetime_boost_matrix(black_box(0.6), boost, mass).unwrap())
    });
}

criterion_group!(benches, kinematics);
criterion_main!(benches);
