//! The dependent-variable array phi_{j,i} and the fundamental birational
//! generators acting on it, together with an exact relation checker.
//!
//! Composition convention: a word [t1, t2, ..., tk] denotes the automorphism
//! t1 t2 ... tk (rightmost acts first on field elements). Its state map
//! applies t1 first: for any rational function f of the variables,
//! f(apply_word(w, s)) = (t1 t2 ... tk)(f)(s).

use rand::Rng;

use crate::error::{Error, Result};
use crate::scalar::{QRat, Scalar};
use crate::specialization::DerivedGen;

/// Fundamental generator tokens; derived tokens expand through
/// [`crate::specialization::derived_word`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Token {
    R(i64),
    S(i64),
    SPrime(i64),
    Pi,
    PiPrime,
    Rho,
    Derived(DerivedGen),
}

/// A token with an inverse flag.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WordEntry {
    pub token: Token,
    pub inverse: bool,
}

/// An ordered product of generators.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct GroupWord(pub Vec<WordEntry>);

impl GroupWord {
    pub fn of(tokens: &[Token]) -> Self {
        GroupWord(
            tokens
                .iter()
                .map(|&t| WordEntry {
                    token: t,
                    inverse: false,
                })
                .collect(),
        )
    }

    pub fn push(&mut self, token: Token) {
        self.0.push(WordEntry {
            token,
            inverse: false,
        });
    }

    pub fn push_inv(&mut self, token: Token) {
        self.0.push(WordEntry {
            token,
            inverse: true,
        });
    }

    pub fn concat(mut self, other: &GroupWord) -> Self {
        self.0.extend_from_slice(&other.0);
        self
    }
}

/// The full array of dependent variables, phi[j][i] with j mod 2n+2 and
/// i mod 2. All entries share one scalar backend and must be nonzero.
#[derive(Clone, Debug, PartialEq)]
pub struct PhiState {
    n: usize,
    phi: Vec<[Scalar; 2]>,
}

fn imod(x: i64, m: i64) -> usize {
    (((x % m) + m) % m) as usize
}

impl PhiState {
    pub fn new(n: usize, phi: Vec<[Scalar; 2]>) -> Result<Self> {
        if n < 1 || phi.len() != 2 * n + 2 {
            return Err(Error::ConfigError(format!(
                "state needs 2n+2 = {} rows, got {}",
                2 * n + 2,
                phi.len()
            )));
        }
        for (j, row) in phi.iter().enumerate() {
            for (i, v) in row.iter().enumerate() {
                if v.is_zero() {
                    return Err(Error::DomainError(format!("phi[{j}][{i}] must be nonzero")));
                }
            }
        }
        Ok(PhiState { n, phi })
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn period(&self) -> i64 {
        2 * self.n as i64 + 2
    }

    pub fn get(&self, j: i64, i: i64) -> &Scalar {
        &self.phi[imod(j, self.period())][imod(i, 2)]
    }

    fn set(&mut self, j: i64, i: i64, v: Scalar) {
        let m = self.period();
        self.phi[imod(j, m)][imod(i, 2)] = v;
    }

    fn blank(&self) -> PhiState {
        PhiState {
            n: self.n,
            phi: vec![[Scalar::zero(), Scalar::zero()]; 2 * self.n + 2],
        }
    }
}

/// Parameters alpha_j, beta_i, beta'_i and q read off a state.
#[derive(Clone, Debug, PartialEq)]
pub struct ObservableParams {
    pub alpha: Vec<Scalar>,
    pub beta: [Scalar; 2],
    pub betap: [Scalar; 2],
    pub qval: Scalar,
}

/// alpha_j = phi_{j,0} phi_{j,1}; beta_i = prod_j phi_{j,i};
/// beta'_i = prod_j phi_{j,i+j}; q = prod_j alpha_j.
pub fn observables(state: &PhiState) -> Result<ObservableParams> {
    let m = state.period();
    let mut alpha = Vec::with_capacity(m as usize);
    for j in 0..m {
        alpha.push(state.get(j, 0).try_mul(state.get(j, 1))?);
    }
    let mut beta = [Scalar::one(), Scalar::one()];
    let mut betap = [Scalar::one(), Scalar::one()];
    for j in 0..m {
        for i in 0..2i64 {
            beta[i as usize] = beta[i as usize].try_mul(state.get(j, i))?;
            betap[i as usize] = betap[i as usize].try_mul(state.get(j, i + j))?;
        }
    }
    let qval = beta[0].try_mul(&beta[1])?;
    Ok(ObservableParams {
        alpha,
        beta,
        betap,
        qval,
    })
}

/// The sums Q_{j,i} = sum_{k=0}^{2n+1} prod_{l<k} phi_{j+l,i} and the primed
/// analogue with phi'_{j,i} = phi_{-j,i-j}.
#[derive(Clone, Debug, PartialEq)]
pub struct QSums {
    pub q: Vec<[Scalar; 2]>,
    pub qp: Vec<[Scalar; 2]>,
}

fn q_sum_at(state: &PhiState, j: i64, i: i64, primed: bool) -> Result<Scalar> {
    let m = state.period();
    let mut total = Scalar::one();
    let mut prod = Scalar::one();
    for k in 0..m - 1 {
        let jj = j + k;
        let factor = if primed {
            state.get(-jj, i - jj)
        } else {
            state.get(jj, i)
        };
        prod = prod.try_mul(factor)?;
        total = total.try_add(&prod)?;
    }
    Ok(total)
}

pub fn q_sums(state: &PhiState) -> Result<QSums> {
    let m = state.period();
    let mut q = Vec::with_capacity(m as usize);
    let mut qp = Vec::with_capacity(m as usize);
    for j in 0..m {
        q.push([q_sum_at(state, j, 0, false)?, q_sum_at(state, j, 1, false)?]);
        qp.push([q_sum_at(state, j, 0, true)?, q_sum_at(state, j, 1, true)?]);
    }
    Ok(QSums { q, qp })
}

fn apply_r(state: &PhiState, j: i64) -> Result<PhiState> {
    let mut new = state.clone();
    for i in 0..2i64 {
        let one_ji = Scalar::one().try_add(state.get(j, i))?;
        let one_ji1 = Scalar::one().try_add(state.get(j, i + 1))?;
        if one_ji.is_zero() {
            return Err(Error::DivisionByZero(format!("1+phi[{j},{i}]")));
        }
        if one_ji1.is_zero() {
            return Err(Error::DivisionByZero(format!("1+phi[{j},{}]", (i + 1) % 2)));
        }
        new.set(
            j - 1,
            i,
            state
                .get(j - 1, i)
                .try_mul(state.get(j, i + 1))?
                .try_mul(&one_ji)?
                .try_div(&one_ji1, "1+phi[j,i+1]")?,
        );
        new.set(j, i, state.get(j, i + 1).inv(&format!("phi[{j},i+1]"))?);
        new.set(
            j + 1,
            i,
            state
                .get(j, i)
                .try_mul(state.get(j + 1, i))?
                .try_mul(&one_ji1)?
                .try_div(&one_ji, "1+phi[j,i]")?,
        );
    }
    Ok(new)
}

fn apply_s(state: &PhiState, i: i64) -> Result<PhiState> {
    let m = state.period();
    let mut new = state.blank();
    let mut qs = Vec::with_capacity(m as usize);
    for j in 0..m {
        qs.push(q_sum_at(state, j, i, false)?);
    }
    for j in 0..m {
        let qj = &qs[imod(j, m)];
        let qj2 = &qs[imod(j + 2, m)];
        if qj.is_zero() || qj2.is_zero() {
            return Err(Error::DivisionByZero(format!(
                "Q[{j}][{i}] or Q[{}][{i}]",
                j + 2
            )));
        }
        new.set(
            j,
            i,
            state
                .get(j + 1, i)
                .inv(&format!("phi[{},{i}]", j + 1))?
                .try_mul(qj)?
                .try_div(qj2, "Q[j+2,i]")?,
        );
        new.set(
            j,
            i + 1,
            state
                .get(j, i)
                .try_mul(state.get(j, i + 1))?
                .try_mul(state.get(j + 1, i))?
                .try_mul(qj2)?
                .try_div(qj, "Q[j,i]")?,
        );
    }
    Ok(new)
}

fn apply_rho(state: &PhiState) -> PhiState {
    let m = state.period();
    let mut new = state.blank();
    for j in 0..m {
        for i in 0..2i64 {
            new.set(j, i, state.get(-j, i - j).clone());
        }
    }
    new
}

fn apply_shift(state: &PhiState, dj: i64, di: i64) -> PhiState {
    let m = state.period();
    let mut new = state.blank();
    for j in 0..m {
        for i in 0..2i64 {
            new.set(j, i, state.get(j + dj, i + di).clone());
        }
    }
    new
}

/// Applies a single fundamental generator (state-map convention: the new
/// entry at (j,i) is the generator's image of phi_{j,i} evaluated on the old
/// state).
pub fn apply_generator(token: Token, state: &PhiState) -> Result<PhiState> {
    apply_entry(
        WordEntry {
            token,
            inverse: false,
        },
        state,
    )
}

fn apply_entry(entry: WordEntry, state: &PhiState) -> Result<PhiState> {
    let WordEntry { token, inverse } = entry;
    match token {
        // involutions: the inverse flag is immaterial
        Token::R(j) => apply_r(state, j),
        Token::S(i) => apply_s(state, i),
        Token::SPrime(i) => {
            // s'_i = rho . s_i . rho
            let w = apply_rho(state);
            let w = apply_s(&w, i)?;
            Ok(apply_rho(&w))
        }
        Token::Rho => Ok(apply_rho(state)),
        Token::Pi => Ok(apply_shift(
            state,
            if inverse { -1 } else { 1 },
            if inverse { -1 } else { 1 },
        )),
        Token::PiPrime => Ok(apply_shift(state, if inverse { -1 } else { 1 }, 0)),
        Token::Derived(g) => {
            let w = crate::specialization::derived_word(g, state.order());
            let w = if inverse {
                invert_word(&w, state.order())
            } else {
                w
            };
            apply_word(&w, state)
        }
    }
}

/// Reverses a word and inverts each fundamental entry.
pub fn invert_word(word: &GroupWord, _n: usize) -> GroupWord {
    GroupWord(
        word.0
            .iter()
            .rev()
            .map(|e| WordEntry {
                token: e.token,
                inverse: !e.inverse,
            })
            .collect(),
    )
}

/// Applies a word left to right (see the module docs for the convention).
pub fn apply_word(word: &GroupWord, state: &PhiState) -> Result<PhiState> {
    let mut cur = state.clone();
    for (step, entry) in word.0.iter().enumerate() {
        cur = apply_entry(*entry, &cur).map_err(|e| match e {
            Error::DivisionByZero(what) => {
                Error::DivisionByZero(format!("{what} at word step {step}"))
            }
            other => other,
        })?;
    }
    Ok(cur)
}

/// Draws phi entries as positive random rationals k/m with 1 <= k,m <= 20,
/// rejecting the degeneracies that sit on pole sets of the generators.
pub fn sample_state<R: Rng>(n: usize, rng: &mut R) -> Result<PhiState> {
    for _ in 0..1000 {
        let phi: Vec<[Scalar; 2]> = (0..2 * n + 2)
            .map(|_| {
                [
                    Scalar::from_ratio(rng.gen_range(1..=20), rng.gen_range(1..=20)),
                    Scalar::from_ratio(rng.gen_range(1..=20), rng.gen_range(1..=20)),
                ]
            })
            .collect();
        let state = PhiState::new(n, phi)?;
        if state_is_degenerate(&state)? {
            continue;
        }
        return Ok(state);
    }
    Err(Error::SamplerExhausted(1000))
}

fn state_is_degenerate(state: &PhiState) -> Result<bool> {
    let m = state.period();
    for j in 0..m {
        for i in 0..2i64 {
            if state.get(j, i).is_zero() {
                return Ok(true);
            }
            if Scalar::one().try_add(state.get(j, i))?.is_zero() {
                return Ok(true);
            }
        }
    }
    let sums = q_sums(state)?;
    for row in sums.q.iter().chain(sums.qp.iter()) {
        if row[0].is_zero() || row[1].is_zero() {
            return Ok(true);
        }
    }
    let obs = observables(state)?;
    for a in &obs.alpha {
        if a == &obs.beta[0] || a == &obs.beta[1] {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Outcome of an exact sampled relation check; on failure carries the first
/// counterexample state.
#[derive(Clone, Debug)]
pub struct RelationReport {
    pub equal: bool,
    pub trials: usize,
    pub counterexample: Option<(usize, PhiState)>,
}

/// Checks lhs and rhs act identically on `trials` sampled exact states.
pub fn check_relation<R: Rng>(
    lhs: &GroupWord,
    rhs: &GroupWord,
    n: usize,
    trials: usize,
    rng: &mut R,
) -> Result<RelationReport> {
    for t in 0..trials {
        let state = sample_state(n, rng)?;
        let a = apply_word(lhs, &state)?;
        let b = apply_word(rhs, &state)?;
        if a != b {
            return Ok(RelationReport {
                equal: false,
                trials: t + 1,
                counterexample: Some((t, state)),
            });
        }
    }
    Ok(RelationReport {
        equal: true,
        trials,
        counterexample: None,
    })
}

/// Positive rational helper for tests and samplers.
pub fn qrat(n: i64, d: i64) -> QRat {
    QRat::new(n.into(), d.into())
}

#[allow(unused_imports)]
use num::traits::{One as _, Zero as _};

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn state_n1(vals0: [i64; 4], vals1: [i64; 4]) -> PhiState {
        PhiState::new(
            1,
            (0..4)
                .map(|j| [Scalar::from_int(vals0[j]), Scalar::from_int(vals1[j])])
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn observables_all_ones() {
        let s = state_n1([1, 1, 1, 1], [1, 1, 1, 1]);
        let obs = observables(&s).unwrap();
        assert!(obs.alpha.iter().all(|a| a.is_one()));
        assert!(obs.beta.iter().all(|b| b.is_one()));
        assert!(obs.betap.iter().all(|b| b.is_one()));
        assert!(obs.qval.is_one());
    }

    #[test]
    fn observables_prime_products() {
        let s = state_n1([2, 3, 5, 7], [1, 1, 1, 1]);
        let obs = observables(&s).unwrap();
        assert_eq!(
            obs.alpha,
            vec![
                Scalar::from_int(2),
                Scalar::from_int(3),
                Scalar::from_int(5),
                Scalar::from_int(7)
            ]
        );
        assert_eq!(obs.beta, [Scalar::from_int(210), Scalar::one()]);
        assert_eq!(obs.betap, [Scalar::from_int(10), Scalar::from_int(21)]);
        assert_eq!(obs.qval, Scalar::from_int(210));
        assert_eq!(obs.beta[0].try_mul(&obs.beta[1]).unwrap(), obs.qval);
    }

    #[test]
    fn q_sums_examples() {
        let ones = state_n1([1, 1, 1, 1], [1, 1, 1, 1]);
        let sums = q_sums(&ones).unwrap();
        for row in &sums.q {
            assert_eq!(row[0], Scalar::from_int(4));
            assert_eq!(row[1], Scalar::from_int(4));
        }
        let s = state_n1([2, 3, 5, 7], [1, 1, 1, 1]);
        let sums = q_sums(&s).unwrap();
        // 1 + 2 + 6 + 30
        assert_eq!(sums.q[0][0], Scalar::from_int(39));
    }

    #[test]
    fn r0_action_on_neighbors() {
        let mut s = state_n1([2, 5, 1, 11], [3, 1, 1, 1]);
        s = apply_generator(Token::R(0), &s).unwrap();
        assert_eq!(s.get(0, 0), &Scalar::from_ratio(1, 3));
        assert_eq!(s.get(1, 0), &Scalar::from_ratio(40, 3));
        assert_eq!(s.get(3, 0), &Scalar::from_ratio(99, 4));
    }

    #[test]
    fn pi_has_full_order() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 1..=2usize {
            let s = sample_state(n, &mut rng).unwrap();
            let mut cur = s.clone();
            for _ in 0..2 * n + 2 {
                cur = apply_generator(Token::Pi, &cur).unwrap();
            }
            assert_eq!(cur, s);
        }
    }

    #[test]
    fn s0_parameter_action() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let s = sample_state(1, &mut rng).unwrap();
        let before = observables(&s).unwrap();
        let after = observables(&apply_generator(Token::S(0), &s).unwrap()).unwrap();
        assert_eq!(after.beta[0], before.beta[0].inv("beta0").unwrap());
        assert_eq!(
            after.beta[1],
            before.beta[1]
                .try_mul(&before.beta[0])
                .unwrap()
                .try_mul(&before.beta[0])
                .unwrap()
        );
        assert_eq!(after.alpha, before.alpha);
        assert_eq!(after.betap, before.betap);
    }

    #[test]
    fn composition_convention_r0_r1() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 1..=2usize {
            let s = sample_state(n, &mut rng).unwrap();
            let w = GroupWord::of(&[Token::R(0), Token::R(1)]);
            let image = apply_word(&w, &s).unwrap();
            assert_eq!(
                observables(&image).unwrap().alpha[0],
                observables(&s).unwrap().alpha[1]
            );
        }
    }

    #[test]
    fn empty_word_and_involution() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let s = sample_state(2, &mut rng).unwrap();
        assert_eq!(apply_word(&GroupWord::default(), &s).unwrap(), s);
        let w = GroupWord::of(&[Token::R(0), Token::R(0)]);
        assert_eq!(apply_word(&w, &s).unwrap(), s);
    }

    #[test]
    fn braid_and_distinct_generators() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let braid_l = GroupWord::of(&[Token::R(0), Token::R(1), Token::R(0)]);
        let braid_r = GroupWord::of(&[Token::R(1), Token::R(0), Token::R(1)]);
        let rep = check_relation(&braid_l, &braid_r, 2, 8, &mut rng).unwrap();
        assert!(rep.equal);
        let rep = check_relation(
            &GroupWord::of(&[Token::R(0)]),
            &GroupWord::of(&[Token::R(1)]),
            2,
            8,
            &mut rng,
        )
        .unwrap();
        assert!(!rep.equal);
        assert_eq!(rep.counterexample.unwrap().0, 0);
    }

    #[test]
    fn pi_rho_twist() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let lhs = GroupWord::of(&[Token::Pi, Token::Rho]);
        let mut rhs = GroupWord::of(&[Token::Rho]);
        rhs.push_inv(Token::PiPrime);
        let rep = check_relation(&lhs, &rhs, 1, 8, &mut rng).unwrap();
        assert!(rep.equal);
    }

    #[test]
    fn sprime_conjugation_matches_transcription() {
        // direct transcription of the primed display, checked against the
        // rho-conjugated implementation
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 1..=2usize {
            let s = sample_state(n, &mut rng).unwrap();
            let m = s.period();
            for i in 0..2i64 {
                let conj = apply_generator(Token::SPrime(i), &s).unwrap();
                let mut direct = s.blank();
                for j in 0..m {
                    let gp = |jj: i64, ii: i64| s.get(-jj, ii - jj).clone();
                    let qj = q_sum_at(&s, j, i, true).unwrap();
                    let qj2 = q_sum_at(&s, j + 2, i, true).unwrap();
                    direct.set(
                        -j,
                        i - j,
                        gp(j + 1, i)
                            .inv("phi'")
                            .unwrap()
                            .try_mul(&qj)
                            .unwrap()
                            .try_div(&qj2, "Q'")
                            .unwrap(),
                    );
                    direct.set(
                        -j,
                        i + 1 - j,
                        gp(j, i)
                            .try_mul(&gp(j, i + 1))
                            .unwrap()
                            .try_mul(&gp(j + 1, i))
                            .unwrap()
                            .try_mul(&qj2)
                            .unwrap()
                            .try_div(&qj, "Q'")
                            .unwrap(),
                    );
                }
                assert_eq!(conj, direct);
            }
        }
    }
}
