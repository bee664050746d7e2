//! Counting formulas `(φᵢ 𝕀 ψᵢ)` and instances of the (Scott) scheme.
//!
//! `(φᵢ 𝕀 ψᵢ)ᵢ₌₁ᵐ` is `K(F₀ ∨ … ∨ Fₘ)` where `Fᵢ` is the disjunction of all
//! sign patterns `d₁φ₁ ∧ … ∧ dₘφₘ ∧ e₁ψ₁ ∧ … ∧ eₘψₘ` with exactly `i` of the
//! `φ`-literals positive and at least `i` of the `ψ`-literals positive. It
//! says every accessible world satisfies at least as many ψ's as φ's.

use thiserror::Error;

use super::Formula;

/// Largest `m` expanded syntactically by default.
pub const EXPANSION_GUARD: usize = 4;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExpansionTooLarge {
    #[error("expansion of arity {m} exceeds the guard {guard}; use the direct semantic check")]
    TooLarge { m: usize, guard: usize },
    #[error("argument lists have different lengths ({0} and {1})")]
    LengthMismatch(usize, usize),
    #[error("argument lists are empty")]
    Empty,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SegerbergMode {
    /// at least as many ψ's as φ's
    I,
    /// the same number of φ's and ψ's: both directions of `I`
    E,
}

fn check(phis: &[Formula], psis: &[Formula], guard: usize) -> Result<(), ExpansionTooLarge> {
    if phis.len() != psis.len() {
        return Err(ExpansionTooLarge::LengthMismatch(phis.len(), psis.len()));
    }
    if phis.is_empty() {
        return Err(ExpansionTooLarge::Empty);
    }
    if phis.len() > guard {
        return Err(ExpansionTooLarge::TooLarge { m: phis.len(), guard });
    }
    Ok(())
}

fn literals(fs: &[Formula], positive: u32) -> impl Iterator<Item = Formula> + '_ {
    fs.iter().enumerate().map(move |(k, f)| if positive & (1 << k) != 0 { f.clone() } else { Formula::not(f.clone()) })
}

fn expand_i(phis: &[Formula], psis: &[Formula]) -> Formula {
    let m = phis.len();
    let patterns: Vec<u32> = (0..1u32 << m).collect();
    let blocks = (0..=m).map(|i| {
        let disjuncts = patterns.iter().filter(|d| d.count_ones() as usize == i).flat_map(|&d| {
            patterns
                .iter()
                .filter(move |e| e.count_ones() as usize >= i)
                .map(move |&e| Formula::conj(literals(phis, d).chain(literals(psis, e))))
        });
        Formula::disj(disjuncts)
    });
    Formula::k(Formula::disj(blocks))
}

/// `(φᵢ𝕀ψᵢ)` or `(φᵢ𝔼ψᵢ)` with the default guard.
pub fn segerberg_expand(phis: &[Formula], psis: &[Formula], mode: SegerbergMode) -> Result<Formula, ExpansionTooLarge> {
    segerberg_expand_guarded(phis, psis, mode, EXPANSION_GUARD)
}

pub fn segerberg_expand_guarded(
    phis: &[Formula],
    psis: &[Formula],
    mode: SegerbergMode,
    guard: usize,
) -> Result<Formula, ExpansionTooLarge> {
    check(phis, psis, guard)?;
    Ok(match mode {
        SegerbergMode::I => expand_i(phis, psis),
        SegerbergMode::E => Formula::and(expand_i(phis, psis), expand_i(psis, phis)),
    })
}

/// `[(φᵢ𝕀ψᵢ) ∧ Bφ₁ ∧ B̌φ₂ ∧ … ∧ B̌φₘ] → Bψ₁ ∨ … ∨ Bψₘ`
pub fn scott_instance(phis: &[Formula], psis: &[Formula]) -> Result<Formula, ExpansionTooLarge> {
    let seg = segerberg_expand(phis, psis, SegerbergMode::I)?;
    let antecedent = Formula::conj(
        std::iter::once(seg)
            .chain(std::iter::once(Formula::b(phis[0].clone())))
            .chain(phis[1..].iter().map(|f| Formula::b_dual(f.clone()))),
    );
    let consequent = Formula::disj(psis.iter().map(|f| Formula::b(f.clone())));
    Ok(Formula::imp(antecedent, consequent))
}
