use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use gbspectra::spectral::{mineig_checks, sym_eigs, CpEstimate};
use gbspectra::{assemble_1d, par, GBSplineBasis, Refinement, SectionSpace};

fn cases() -> Vec<(usize, SectionSpace, usize)> {
    let spaces = [
        SectionSpace::polynomial(),
        SectionSpace::hyperbolic(1.0, Refinement::NonNested),
        SectionSpace::trigonometric(1.0, Refinement::Nested),
    ];
    let mut out = Vec::new();
    for p in [2, 3] {
        for space in spaces {
            for n in [32, 64] {
                out.push((p, space, n));
            }
        }
    }
    out
}

fn mass_extremes(&(p, space, n): &(usize, SectionSpace, usize)) -> (f64, f64) {
    let set = assemble_1d(GBSplineBasis::uniform(n, p, space).unwrap()).unwrap();
    let spec = sym_eigs(&set.mass).unwrap();
    (spec.min(), spec.max())
}

fn mineig(&(p, space, n): &(usize, SectionSpace, usize)) -> usize {
    let set = assemble_1d(GBSplineBasis::uniform(n, p, space).unwrap()).unwrap();
    let cp = CpEstimate {
        lower: 0.0,
        upper: 1.0,
    };
    mineig_checks(&set, cp).unwrap().len()
}

fn assembly(&(p, space, n): &(usize, SectionSpace, usize)) -> usize {
    assemble_1d(GBSplineBasis::uniform(n, p, space).unwrap())
        .unwrap()
        .size()
}

fn bench_sweeps(c: &mut Criterion) {
    let cases = cases();
    let mut group = c.benchmark_group("sweep");
    group.sample_size(10);
    group.bench_function(BenchmarkId::new("mass-extremes", "parallel"), |b| {
        b.iter(|| par::map(&cases, mass_extremes))
    });
    group.bench_function(BenchmarkId::new("mass-extremes", "sequential"), |b| {
        b.iter(|| par::map_sequential(&cases, mass_extremes))
    });
    group.bench_function(BenchmarkId::new("mineig", "parallel"), |b| {
        b.iter(|| par::map(&cases, mineig))
    });
    group.bench_function(BenchmarkId::new("mineig", "sequential"), |b| {
        b.iter(|| par::map_sequential(&cases, mineig))
    });
    group.bench_function(BenchmarkId::new("assembly-1d", "parallel"), |b| {
        b.iter(|| par::map(&cases, assembly))
    });
    group.bench_function(BenchmarkId::new("assembly-1d", "sequential"), |b| {
        b.iter(|| par::map_sequential(&cases, assembly))
    });
    group.finish();
}

criterion_group!(benches, bench_sweeps);
criterion_main!(benches);
