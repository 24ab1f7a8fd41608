//! Line-oriented `key = value` configuration text.
//!
//! Keys are the [`SimConfig`] field names. Blank lines and lines starting with
//! `#` are ignored; keys missing from a file keep their default value. Enum
//! fields use these spellings:
//!
//! ```text
//! termination      = energy | steps:<N>
//! penalty_mode     = proportional | fixed:<cost>
//! placement_policy = score | coinflip
//! init_layout      = random | presorted | presorted:<spread>
//!                  | presorted:<spread>:<x>,<y>;<x>,<y>;<x>,<y>
//! ```
//!
//! Reals are written in Rust's shortest round-trip form, so
//! `parse(serialize(c)) == c` holds exactly.

use std::fmt::Write as _;

use thiserror::Error;

use crate::model::{
    InitLayout, PenaltyMode, PlacementPolicy, Point, SimConfig, Termination, DEFAULT_PILE_SPREAD,
};

pub const CONFIG_KEYS: [&str; 21] = [
    "board_width",
    "board_height",
    "count_small",
    "count_medium",
    "count_large",
    "agent_count",
    "initial_energy",
    "bonus",
    "penalty",
    "p_max",
    "p_min",
    "delay_reset",
    "step_length",
    "agent_radius",
    "termination",
    "penalty_mode",
    "placement_policy",
    "sample_interval",
    "step_cap",
    "seed",
    "init_layout",
];

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: duplicate key `{key}`")]
    DuplicateKey { line: usize, key: String },
    #[error("line {line}: bad value for `{key}`: {message}")]
    BadValue {
        line: usize,
        key: String,
        message: String,
    },
}

/// Error from assigning one field by name.
#[derive(Debug, Error, PartialEq)]
pub enum FieldError {
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("{0}")]
    BadValue(String),
}

fn parse_num<T: std::str::FromStr>(value: &str) -> Result<T, FieldError>
where
    T::Err: std::fmt::Display,
{
    value
        .parse::<T>()
        .map_err(|e| FieldError::BadValue(format!("`{value}`: {e}")))
}

fn parse_point(s: &str) -> Result<Point, FieldError> {
    let (x, y) = s
        .split_once(',')
        .ok_or_else(|| FieldError::BadValue(format!("`{s}` is not an `x,y` pair")))?;
    Ok(Point::new(parse_num(x.trim())?, parse_num(y.trim())?))
}

pub fn parse_termination(v: &str) -> Result<Termination, FieldError> {
    match v {
        "energy" => Ok(Termination::EnergyExhaustion),
        _ => match v.strip_prefix("steps:") {
            Some(n) => Ok(Termination::StepLimit(parse_num(n)?)),
            None => Err(FieldError::BadValue(format!(
                "`{v}`: expected `energy` or `steps:<N>`"
            ))),
        },
    }
}

pub fn format_termination(t: Termination) -> String {
    match t {
        Termination::EnergyExhaustion => "energy".to_string(),
        Termination::StepLimit(n) => format!("steps:{n}"),
    }
}

pub fn parse_penalty_mode(v: &str) -> Result<PenaltyMode, FieldError> {
    match v {
        "proportional" => Ok(PenaltyMode::Proportional),
        _ => match v.strip_prefix("fixed:") {
            Some(c) => Ok(PenaltyMode::Fixed(parse_num(c)?)),
            None => Err(FieldError::BadValue(format!(
                "`{v}`: expected `proportional` or `fixed:<cost>`"
            ))),
        },
    }
}

pub fn format_penalty_mode(m: PenaltyMode) -> String {
    match m {
        PenaltyMode::Proportional => "proportional".to_string(),
        PenaltyMode::Fixed(v) => format!("fixed:{v}"),
    }
}

pub fn parse_layout(v: &str, board_width: f64, board_height: f64) -> Result<InitLayout, FieldError> {
    if v == "random" {
        return Ok(InitLayout::RandomUniform);
    }
    let rest = match v.strip_prefix("presorted") {
        Some(r) => r,
        None => {
            return Err(FieldError::BadValue(format!(
                "`{v}`: expected `random` or `presorted[:spread[:centers]]`"
            )))
        }
    };
    let default = InitLayout::presorted_default(board_width, board_height);
    let InitLayout::PreSortedPiles { mut centers, mut spread } = default else {
        unreachable!()
    };
    if rest.is_empty() {
        return Ok(InitLayout::PreSortedPiles { centers, spread });
    }
    let rest = rest
        .strip_prefix(':')
        .ok_or_else(|| FieldError::BadValue(format!("`{v}`: expected `:` after `presorted`")))?;
    let (spread_s, centers_s) = match rest.split_once(':') {
        Some((s, c)) => (s, Some(c)),
        None => (rest, None),
    };
    spread = if spread_s.is_empty() {
        DEFAULT_PILE_SPREAD
    } else {
        parse_num(spread_s)?
    };
    if let Some(cs) = centers_s {
        let pts: Vec<&str> = cs.split(';').collect();
        if pts.len() != 3 {
            return Err(FieldError::BadValue(format!(
                "`{v}`: expected three pile centers separated by `;`"
            )));
        }
        for (slot, p) in centers.iter_mut().zip(pts) {
            *slot = parse_point(p)?;
        }
    }
    Ok(InitLayout::PreSortedPiles { centers, spread })
}

pub fn format_layout(l: &InitLayout) -> String {
    match l {
        InitLayout::RandomUniform => "random".to_string(),
        InitLayout::PreSortedPiles { centers, spread } => {
            let cs: Vec<String> = centers.iter().map(|c| format!("{},{}", c.x, c.y)).collect();
            format!("presorted:{spread}:{}", cs.join(";"))
        }
    }
}

/// Assigns one field from its textual value.
pub fn set_field(config: &mut SimConfig, key: &str, value: &str) -> Result<(), FieldError> {
    match key {
        "board_width" => config.board_width = parse_num(value)?,
        "board_height" => config.board_height = parse_num(value)?,
        "count_small" => config.count_small = parse_num(value)?,
        "count_medium" => config.count_medium = parse_num(value)?,
        "count_large" => config.count_large = parse_num(value)?,
        "agent_count" => config.agent_count = parse_num(value)?,
        "initial_energy" => config.initial_energy = parse_num(value)?,
        "bonus" => config.bonus = parse_num(value)?,
        "penalty" => config.penalty = parse_num(value)?,
        "p_max" => config.p_max = parse_num(value)?,
        "p_min" => config.p_min = parse_num(value)?,
        "delay_reset" => config.delay_reset = parse_num(value)?,
        "step_length" => config.step_length = parse_num(value)?,
        "agent_radius" => config.agent_radius = parse_num(value)?,
        "termination" => config.termination = parse_termination(value)?,
        "penalty_mode" => config.penalty_mode = parse_penalty_mode(value)?,
        "placement_policy" => {
            config.placement_policy = match value {
                "score" => PlacementPolicy::Score,
                "coinflip" => PlacementPolicy::CoinFlip,
                _ => {
                    return Err(FieldError::BadValue(format!(
                        "`{value}`: expected `score` or `coinflip`"
                    )))
                }
            }
        }
        "sample_interval" => config.sample_interval = parse_num(value)?,
        "step_cap" => config.step_cap = parse_num(value)?,
        "seed" => config.seed = parse_num(value)?,
        "init_layout" => {
            config.init_layout = parse_layout(value, config.board_width, config.board_height)?
        }
        _ => return Err(FieldError::UnknownKey(key.to_string())),
    }
    Ok(())
}

/// Textual value of one field, in the form [`set_field`] accepts.
pub fn get_field(config: &SimConfig, key: &str) -> Option<String> {
    let s = match key {
        "board_width" => config.board_width.to_string(),
        "board_height" => config.board_height.to_string(),
        "count_small" => config.count_small.to_string(),
        "count_medium" => config.count_medium.to_string(),
        "count_large" => config.count_large.to_string(),
        "agent_count" => config.agent_count.to_string(),
        "initial_energy" => config.initial_energy.to_string(),
        "bonus" => config.bonus.to_string(),
        "penalty" => config.penalty.to_string(),
        "p_max" => config.p_max.to_string(),
        "p_min" => config.p_min.to_string(),
        "delay_reset" => config.delay_reset.to_string(),
        "step_length" => config.step_length.to_string(),
        "agent_radius" => config.agent_radius.to_string(),
        "termination" => format_termination(config.termination),
        "penalty_mode" => format_penalty_mode(config.penalty_mode),
        "placement_policy" => match config.placement_policy {
            PlacementPolicy::Score => "score".to_string(),
            PlacementPolicy::CoinFlip => "coinflip".to_string(),
        },
        "sample_interval" => config.sample_interval.to_string(),
        "step_cap" => config.step_cap.to_string(),
        "seed" => config.seed.to_string(),
        "init_layout" => format_layout(&config.init_layout),
        _ => return None,
    };
    Some(s)
}

/// Splits a line into `(key, value)`, or `None` for blank and comment lines.
pub(crate) fn split_line(line: &str, lineno: usize) -> Result<Option<(&str, &str)>, ConfigError> {
    let trimmed = line.trim();
    if trimmed.is_empty() || trimmed.starts_with('#') {
        return Ok(None);
    }
    let (k, v) = trimmed
        .split_once('=')
        .ok_or(ConfigError::Syntax { line: lineno })?;
    let k = k.trim();
    if k.is_empty() {
        return Err(ConfigError::Syntax { line: lineno });
    }
    Ok(Some((k, v.trim())))
}

/// Parses configuration text. The result is not validated.
pub fn parse_config(text: &str) -> Result<SimConfig, ConfigError> {
    let mut config = SimConfig::default();
    let mut seen: Vec<String> = Vec::new();
    // init_layout depends on the board size, so it is applied last.
    let mut layout: Option<(usize, String)> = None;
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        let Some((key, value)) = split_line(line, lineno)? else {
            continue;
        };
        if seen.iter().any(|s| s == key) {
            return Err(ConfigError::DuplicateKey {
                line: lineno,
                key: key.to_string(),
            });
        }
        seen.push(key.to_string());
        if key == "init_layout" {
            layout = Some((lineno, value.to_string()));
            continue;
        }
        apply(&mut config, key, value, lineno)?;
    }
    if let Some((lineno, value)) = layout {
        apply(&mut config, "init_layout", &value, lineno)?;
    }
    Ok(config)
}

pub(crate) fn apply(config: &mut SimConfig, key: &str, value: &str, line: usize) -> Result<(), ConfigError> {
    set_field(config, key, value).map_err(|e| match e {
        FieldError::UnknownKey(key) => ConfigError::UnknownKey { line, key },
        FieldError::BadValue(message) => ConfigError::BadValue {
            line,
            key: key.to_string(),
            message,
        },
    })
}

/// Writes every field, one per line, in declaration order.
pub fn serialize_config(config: &SimConfig) -> String {
    let mut out = String::new();
    for key in CONFIG_KEYS {
        let value = get_field(config, key).expect("every listed key is known");
        let _ = writeln!(out, "{key} = {value}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn default_round_trip() {
        let c = SimConfig::default();
        let text = serialize_config(&c);
        assert_eq!(parse_config(&text).unwrap(), c);
        assert_eq!(serialize_config(&parse_config(&text).unwrap()), text);
    }

    #[test]
    fn partial_file_keeps_defaults() {
        let c = parse_config("# equal objects\n\nagent_count = 9\ntermination = steps:500\n").unwrap();
        assert_eq!(c.agent_count, 9);
        assert_eq!(c.termination, Termination::StepLimit(500));
        assert_eq!(c.count_small, 15);
    }

    #[test]
    fn unknown_key_rejected() {
        let err = parse_config("seed = 3\nspeed = 2\n").unwrap_err();
        assert_eq!(
            err,
            ConfigError::UnknownKey {
                line: 2,
                key: "speed".into()
            }
        );
    }

    #[test]
    fn bad_values_name_the_key() {
        let err = parse_config("p_min = abc").unwrap_err();
        assert!(err.to_string().contains("p_min"));
        assert!(matches!(parse_config("noequals"), Err(ConfigError::Syntax { line: 1 })));
        assert!(matches!(
            parse_config("seed = 1\nseed = 2"),
            Err(ConfigError::DuplicateKey { line: 2, .. })
        ));
        assert!(parse_config("termination = forever").is_err());
        assert!(parse_config("penalty_mode = fixed:x").is_err());
        assert!(parse_config("init_layout = presorted:6:1,2;3,4").is_err());
    }

    #[test]
    fn layout_forms() {
        let c = parse_config("board_width = 200\ninit_layout = presorted").unwrap();
        assert_eq!(c.init_layout, InitLayout::presorted_default(200.0, crate::model::DEFAULT_BOARD_SIDE));
        let c = parse_config("init_layout = presorted:4:10,10;20,20;30,30").unwrap();
        assert_eq!(
            c.init_layout,
            InitLayout::PreSortedPiles {
                centers: [Point::new(10.0, 10.0), Point::new(20.0, 20.0), Point::new(30.0, 30.0)],
                spread: 4.0
            }
        );
    }

    fn arb_config() -> impl Strategy<Value = SimConfig> {
        (
            (1.0f64..500.0, 1.0f64..500.0, 0usize..60, 0usize..60, 0usize..60, 1usize..100),
            (-1e4f64..1e4, 0.0f64..1.0, -100.0f64..0.0, 0.0f64..1.0, 1.0f64..10.0),
            (0u32..10, 0.01f64..5.0, proptest::option::of(0u64..10_000_000), 0.0f64..3.0),
            (proptest::option::of(0.0f64..10.0), any::<bool>(), 0u64..100_000, any::<u64>(), any::<u64>()),
            proptest::option::of((0.1f64..20.0, 0.0f64..1.0, 0.0f64..1.0)),
        )
            .prop_map(|((w, h, s, m, l, a), (e, bonus, penalty, pmin, pmax), (d, step, lim, reach), (fixed, coin, si, seed, cap), piles)| {
                SimConfig {
                    board_width: w,
                    board_height: h,
                    count_small: s,
                    count_medium: m,
                    count_large: l,
                    agent_count: a,
                    initial_energy: e,
                    bonus,
                    penalty,
                    p_max: pmax,
                    p_min: pmin,
                    delay_reset: d,
                    step_length: step,
                    agent_radius: reach,
                    termination: lim.map_or(Termination::EnergyExhaustion, Termination::StepLimit),
                    penalty_mode: fixed.map_or(PenaltyMode::Proportional, PenaltyMode::Fixed),
                    placement_policy: if coin { PlacementPolicy::CoinFlip } else { PlacementPolicy::Score },
                    sample_interval: si,
                    step_cap: cap,
                    seed,
                    init_layout: match piles {
                        None => InitLayout::RandomUniform,
                        Some((spread, fx, fy)) => InitLayout::PreSortedPiles {
                            centers: [
                                Point::new(fx * w, fy * h),
                                Point::new(fy * w, fx * h),
                                Point::new(w / 3.0, h / 7.0),
                            ],
                            spread,
                        },
                    },
                }
            })
    }

    proptest! {
        #[test]
        fn serialize_parse_round_trip(c in arb_config()) {
            let text = serialize_config(&c);
            let back = parse_config(&text).unwrap();
            prop_assert_eq!(&back, &c);
            prop_assert_eq!(serialize_config(&back), text);
        }
    }
}
