//! C ABI over `bcg-core`.
//!
//! Games live behind an opaque [`BcgGame`] handle created by one of the
//! `bcg_game_*` constructors and released with [`bcg_game_free`]. Every
//! fallible call returns a [`BcgStatus`]; on failure the message is available
//! from [`bcg_last_error_message`] on the same thread. Results are written
//! through out-pointers, which are left untouched on failure. Strings handed
//! out by the library must be released with [`bcg_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use bcg_core::equilibrium::{self, Method};
use bcg_core::instances::{self, FamilySpec, RandomSpec};
use bcg_core::smoothness::{self, Regime};
use bcg_core::{stochastic, Error, Game, StrategyProfile};

/// Opaque handle to a validated game.
pub struct BcgGame {
    game: Game,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BcgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    InvalidGame = 4,
    Parse = 5,
    Io = 6,
    TooLarge = 7,
    NoConvergence = 8,
    Internal = 9,
    Panic = 10,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BcgFamily {
    Pigou = 0,
    Bypass = 1,
    Roundabout = 2,
    Triangle = 3,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BcgRegime {
    Low = 0,
    Mid = 1,
    High = 2,
}

/// Summary of an analysis. `exhaustive` is false for best-response-only
/// reports, whose ratios are lower estimates.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct BcgAnalysis {
    pub num_equilibria: usize,
    pub optimum_cost: f64,
    pub best_eq_cost: f64,
    pub worst_eq_cost: f64,
    pub poa: f64,
    pub pos: f64,
    pub exhaustive: bool,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BcgBound {
    pub p: f64,
    pub poa: f64,
    pub pos: f64,
    pub lambda: f64,
    pub mu: f64,
    pub y_min: f64,
    pub regime: BcgRegime,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BcgSmoothnessCheck {
    /// Largest `LHS - RHS` over the grid; at most 0 when the inequality holds.
    pub worst_violation: f64,
    pub worst_k: usize,
    pub worst_m: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let message = CString::new(message.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(message));
}

struct Failure(BcgStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::InvalidGame(_) => BcgStatus::InvalidGame,
            Error::Parse { .. } => BcgStatus::Parse,
            Error::Io { .. } => BcgStatus::Io,
            Error::TooLarge { .. } => BcgStatus::TooLarge,
            Error::NoConvergence { .. } => BcgStatus::NoConvergence,
            Error::Internal(_) => BcgStatus::Internal,
            _ => BcgStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

type Attempt<T> = Result<T, Failure>;

/// Runs `body`, recording any error or panic as the thread's last error.
fn call(body: impl FnOnce() -> Attempt<()>) -> BcgStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => BcgStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_last_error(message);
            status
        }
        Err(payload) => {
            let message = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("panic: {message}"));
            BcgStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(BcgStatus::NullPointer, format!("{what} is null"))
}

unsafe fn game_ref<'a>(game: *const BcgGame) -> Attempt<&'a Game> {
    game.as_ref().map(|g| &g.game).ok_or_else(|| null("game"))
}

unsafe fn out_ref<'a, T>(out: *mut T) -> Attempt<&'a mut T> {
    out.as_mut().ok_or_else(|| null("output pointer"))
}

unsafe fn text<'a>(s: *const c_char, what: &str) -> Attempt<&'a str> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s).to_str().map_err(|e| Failure(BcgStatus::InvalidUtf8, format!("{what}: {e}")))
}

unsafe fn profile(choices: *const usize, len: usize) -> Attempt<StrategyProfile> {
    if len == 0 {
        return Ok(StrategyProfile::new(Vec::new()));
    }
    if choices.is_null() {
        return Err(null("profile"));
    }
    Ok(StrategyProfile::new(std::slice::from_raw_parts(choices, len).to_vec()))
}

fn into_handle(game: Game) -> *mut BcgGame {
    Box::into_raw(Box::new(BcgGame { game }))
}

fn into_c_string(s: String) -> Attempt<*mut c_char> {
    CString::new(s).map(CString::into_raw).map_err(|e| Failure(BcgStatus::Internal, e.to_string()))
}

/// Message of the last failed call on this thread, or null if none. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn bcg_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn bcg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses and validates a game from a JSON document.
///
/// # Safety
/// `json` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bcg_game_from_json(json: *const c_char, out: *mut *mut BcgGame) -> BcgStatus {
    call(|| {
        let out = out_ref(out)?;
        let game = instances::game_from_json(text(json, "json")?, "<json>")?;
        *out = into_handle(game);
        Ok(())
    })
}

/// Loads and validates a game from a JSON file.
///
/// # Safety
/// `path` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bcg_game_load(path: *const c_char, out: *mut *mut BcgGame) -> BcgStatus {
    call(|| {
        let out = out_ref(out)?;
        let game = instances::load_instance(Path::new(text(path, "path")?))?;
        *out = into_handle(game);
        Ok(())
    })
}

/// Writes a game as JSON to `path`.
///
/// # Safety
/// `game` must be a live handle and `path` a nul-terminated string.
#[no_mangle]
pub unsafe extern "C" fn bcg_game_save(game: *const BcgGame, path: *const c_char) -> BcgStatus {
    call(|| {
        instances::save_instance(game_ref(game)?, Path::new(text(path, "path")?))?;
        Ok(())
    })
}

/// JSON text of a game; release with [`bcg_string_free`].
///
/// # Safety
/// `game` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bcg_game_to_json(game: *const BcgGame, out: *mut *mut c_char) -> BcgStatus {
    call(|| {
        let out = out_ref(out)?;
        *out = into_c_string(instances::game_to_json(game_ref(game)?))?;
        Ok(())
    })
}

/// Generates a family instance. `m` is only read for roundabouts, where 0
/// selects `⌊(1 + p + √(p(2+p))) k⌋`; `k` is ignored for the triangle.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bcg_game_generate(
    family: BcgFamily,
    k: usize,
    m: usize,
    p: f64,
    out: *mut *mut BcgGame,
) -> BcgStatus {
    call(|| {
        let out = out_ref(out)?;
        let spec = match family {
            BcgFamily::Pigou => FamilySpec::Pigou { k, p },
            BcgFamily::Bypass => FamilySpec::Bypass { k, p },
            BcgFamily::Roundabout => {
                FamilySpec::Roundabout { k, m: if m == 0 { instances::roundabout_m(k, p) } else { m }, p }
            }
            BcgFamily::Triangle => FamilySpec::Triangle { p },
        };
        *out = into_handle(spec.generate()?);
        Ok(())
    })
}

/// Random affine instance, deterministic in `seed`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bcg_game_random(
    players: usize,
    resources: usize,
    max_strategies: usize,
    p_min: f64,
    p_max: f64,
    seed: u64,
    out: *mut *mut BcgGame,
) -> BcgStatus {
    call(|| {
        let out = out_ref(out)?;
        let spec = RandomSpec { players, resources, max_strategies, p_range: (p_min, p_max), seed };
        *out = into_handle(instances::gen_random(&spec)?);
        Ok(())
    })
}

/// Releases a game. Null is ignored.
///
/// # Safety
/// `game` must come from this library and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn bcg_game_free(game: *mut BcgGame) {
    if !game.is_null() {
        drop(Box::from_raw(game));
    }
}

/// Number of players, 0 for a null handle.
///
/// # Safety
/// `game` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bcg_game_num_players(game: *const BcgGame) -> usize {
    game.as_ref().map_or(0, |g| g.game.num_players())
}

/// Number of resources, 0 for a null handle.
///
/// # Safety
/// `game` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bcg_game_num_resources(game: *const BcgGame) -> usize {
    game.as_ref().map_or(0, |g| g.game.num_resources())
}

/// Expected cost of `player` under the profile `choices[0..len]`.
///
/// # Safety
/// `game` must be a live handle, `choices` must point to `len` values and
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn bcg_expected_player_cost(
    game: *const BcgGame,
    choices: *const usize,
    len: usize,
    player: usize,
    out: *mut f64,
) -> BcgStatus {
    call(|| {
        let out = out_ref(out)?;
        *out = stochastic::expected_player_cost(game_ref(game)?, &profile(choices, len)?, player)?;
        Ok(())
    })
}

/// Expected social cost of the profile `choices[0..len]`.
///
/// # Safety
/// As for [`bcg_expected_player_cost`].
#[no_mangle]
pub unsafe extern "C" fn bcg_expected_social_cost(
    game: *const BcgGame,
    choices: *const usize,
    len: usize,
    out: *mut f64,
) -> BcgStatus {
    call(|| {
        let out = out_ref(out)?;
        *out = stochastic::expected_social_cost(game_ref(game)?, &profile(choices, len)?)?;
        Ok(())
    })
}

/// Expected Rosenthal potential of the profile `choices[0..len]`.
///
/// # Safety
/// As for [`bcg_expected_player_cost`].
#[no_mangle]
pub unsafe extern "C" fn bcg_potential(
    game: *const BcgGame,
    choices: *const usize,
    len: usize,
    out: *mut f64,
) -> BcgStatus {
    call(|| {
        let out = out_ref(out)?;
        *out = equilibrium::potential(game_ref(game)?, &profile(choices, len)?)?;
        Ok(())
    })
}

/// Whether `choices[0..len]` is an equilibrium up to `eps`.
///
/// # Safety
/// As for [`bcg_expected_player_cost`].
#[no_mangle]
pub unsafe extern "C" fn bcg_is_equilibrium(
    game: *const BcgGame,
    choices: *const usize,
    len: usize,
    eps: f64,
    out: *mut bool,
) -> BcgStatus {
    call(|| {
        let out = out_ref(out)?;
        *out = equilibrium::is_equilibrium(game_ref(game)?, &profile(choices, len)?, eps)?;
        Ok(())
    })
}

/// Exhaustive analysis. Fails with [`BcgStatus::TooLarge`] past the
/// enumeration limit.
///
/// # Safety
/// `game` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bcg_analyze(game: *const BcgGame, eps: f64, out: *mut BcgAnalysis) -> BcgStatus {
    call(|| {
        let out = out_ref(out)?;
        let r = equilibrium::analyze(game_ref(game)?, eps)?;
        *out = BcgAnalysis {
            num_equilibria: r.equilibria.len(),
            optimum_cost: r.social_optimum.cost,
            best_eq_cost: r.best_eq_cost,
            worst_eq_cost: r.worst_eq_cost,
            poa: r.poa,
            pos: r.pos,
            exhaustive: r.method == Method::Exhaustive,
        };
        Ok(())
    })
}

/// Full analysis report as JSON, including every equilibrium profile;
/// release with [`bcg_string_free`].
///
/// # Safety
/// `game` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bcg_analyze_json(game: *const BcgGame, eps: f64, out: *mut *mut c_char) -> BcgStatus {
    call(|| {
        let out = out_ref(out)?;
        let report = equilibrium::analyze(game_ref(game)?, eps)?;
        let json = serde_json::to_string(&report).map_err(|e| Failure(BcgStatus::Internal, e.to_string()))?;
        *out = into_c_string(json)?;
        Ok(())
    })
}

/// Tight price-of-anarchy bound at `p`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bcg_poa_bound(p: f64, out: *mut f64) -> BcgStatus {
    call(|| {
        let out = out_ref(out)?;
        *out = smoothness::poa_bound(p)?;
        Ok(())
    })
}

/// Tight price-of-stability bound at `p`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bcg_pos_bound(p: f64, out: *mut f64) -> BcgStatus {
    call(|| {
        let out = out_ref(out)?;
        *out = smoothness::pos_bound(p)?;
        Ok(())
    })
}

/// Every closed-form quantity at `p ∈ (0, 1]`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bcg_bound(p: f64, out: *mut BcgBound) -> BcgStatus {
    call(|| {
        let out = out_ref(out)?;
        let b = smoothness::bound(p)?;
        *out = BcgBound {
            p: b.p,
            poa: b.poa,
            pos: b.pos,
            lambda: b.lambda,
            mu: b.mu,
            y_min: b.y_min,
            regime: match b.regime {
                Regime::Low => BcgRegime::Low,
                Regime::Mid => BcgRegime::Mid,
                Regime::High => BcgRegime::High,
            },
        };
        Ok(())
    })
}

/// Upper regime breakpoint, the real root of `8p³ + 4p² = 1`.
#[no_mangle]
pub extern "C" fn bcg_p_bar1() -> f64 {
    smoothness::p_bar1()
}

/// Checks `k(1+mp) <= λ k(1-p+pk) + μ m(1-p+pm)` on `1 <= k <= k_max`,
/// `0 <= m <= m_max`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bcg_verify_smoothness(
    p: f64,
    lambda: f64,
    mu: f64,
    k_max: usize,
    m_max: usize,
    out: *mut BcgSmoothnessCheck,
) -> BcgStatus {
    call(|| {
        let out = out_ref(out)?;
        let check = smoothness::verify_smoothness(p, lambda, mu, k_max, m_max);
        *out = BcgSmoothnessCheck {
            worst_violation: check.worst_violation,
            worst_k: check.worst_pair.0,
            worst_m: check.worst_pair.1,
        };
        Ok(())
    })
}
