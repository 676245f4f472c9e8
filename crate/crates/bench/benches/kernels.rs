use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use qgarnier::matrices::word_matrix;
use qgarnier::qhyper::eval_x;
use qgarnier::scalar::{bits_for_digits, pow10_neg};
use qgarnier::specialization::DerivedGen;
use qgarnier::weyl::{apply_word, GroupWord, Token};

use qgarnier_bench::{fixture_cparams, fixture_state};

fn bench_eval_x(c: &mut Criterion) {
    let mut g = c.benchmark_group("eval_x");
    for n in [1usize, 2] {
        let prec = bits_for_digits(60);
        let tol = pow10_neg(45, prec);
        let cp = fixture_cparams(n);
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| eval_x(&cp, &tol).unwrap())
        });
    }
    g.finish();
}

fn bench_braid_word(c: &mut Criterion) {
    let mut g = c.benchmark_group("braid_word");
    for n in [1usize, 2, 3] {
        let state = fixture_state(n);
        let word = GroupWord::of(&[Token::R(0), Token::R(1), Token::R(0)]);
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| apply_word(&word, &state).unwrap())
        });
    }
    g.finish();
}

fn bench_tau_c_cocycle(c: &mut Criterion) {
    let mut g = c.benchmark_group("tau_c_cocycle");
    for n in [1usize, 2] {
        let prec = bits_for_digits(60);
        let cp = fixture_cparams(n).to_real(prec).unwrap();
        let word = [DerivedGen::SigmaPrime, DerivedGen::Sigma];
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| word_matrix(&word, &cp).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, bench_eval_x, bench_braid_word, bench_tau_c_cocycle);
criterion_main!(benches);
