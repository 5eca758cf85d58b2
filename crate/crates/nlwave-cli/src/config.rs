//! Line-oriented `key = value` run configuration: `#` comments, unknown
//! keys rejected, every violation reported with its line number. Defaults
//! are filled per command and echoed back in a form that re-parses to an
//! equal configuration.

use std::fmt::Write as _;

#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    ValidateKernel,
    Simulate,
    Sweep,
    Linearized,
    Probes,
    Crosscheck,
    NashMoser,
}

impl Command {
    pub fn parse(s: &str) -> Option<Command> {
        match s {
            "validate-kernel" => Some(Command::ValidateKernel),
            "simulate" => Some(Command::Simulate),
            "sweep" => Some(Command::Sweep),
            "linearized" => Some(Command::Linearized),
            "probes" => Some(Command::Probes),
            "crosscheck" => Some(Command::Crosscheck),
            "nashmoser" => Some(Command::NashMoser),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Command::ValidateKernel => "validate-kernel",
            Command::Simulate => "simulate",
            Command::Sweep => "sweep",
            Command::Linearized => "linearized",
            Command::Probes => "probes",
            Command::Crosscheck => "crosscheck",
            Command::NashMoser => "nashmoser",
        }
    }

    pub const ALL: &'static [&'static str] = &[
        "validate-kernel",
        "simulate",
        "sweep",
        "linearized",
        "probes",
        "crosscheck",
        "nashmoser",
    ];
}

#[derive(Debug, Clone, PartialEq)]
pub enum KernelSpec {
    Builtin(String),
    /// path to a CSV of `xi,beta_hat` rows
    File(String),
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialSpec {
    /// `amplitude * exp(-x^2)`
    Gaussian,
    /// `amplitude * sin(pi x / L)` (always periodic on the box)
    Sine,
    Zero,
    /// snapshot file with rows `x,u` or `x,u,v`
    File(String),
}

/// Fully resolved run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub kernel: KernelSpec,
    pub half_length: f64,
    pub n_points: usize,
    pub epsilon: f64,
    pub power: u32,
    pub sobolev_index: f64,
    /// None means the solver's default rule
    pub dt: Option<f64>,
    pub t_end: f64,
    pub t_cap: f64,
    pub escape_factor: f64,
    pub seed: u64,
    pub epsilon_list: Vec<f64>,
    pub integrator: String,
    pub initial: InitialSpec,
    pub amplitude: f64,
    pub sample_every: usize,
    pub snapshots: Vec<f64>,
    pub samples: u32,
    pub out_dir: String,
}

fn err(lineno: usize, msg: impl Into<String>) -> String {
    format!("line {}: {}", lineno, msg.into())
}

/// Parses the config text plus optional command-line overrides. `text` may
/// be empty; the command must come from the text or the override.
pub fn parse_config(
    text: &str,
    command_override: Option<&str>,
    out_override: Option<&str>,
    seed_override: Option<u64>,
) -> Result<RunConfig, String> {
    struct Raw {
        lineno: usize,
        value: String,
    }
    let mut raw: std::collections::HashMap<&str, Raw> = Default::default();
    const KEYS: &[&str] = &[
        "command",
        "kernel",
        "kernel_file",
        "L",
        "N",
        "epsilon",
        "p",
        "s",
        "dt",
        "t_end",
        "T_cap",
        "M",
        "seed",
        "epsilon_list",
        "integrator",
        "initial",
        "initial_file",
        "amplitude",
        "sample_every",
        "snapshots",
        "samples",
        "out_dir",
    ];
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| err(lineno, "expected 'key = value'"))?;
        let key = key.trim();
        let value = value.trim();
        let key = KEYS
            .iter()
            .find(|k| **k == key)
            .ok_or_else(|| err(lineno, format!("unknown key '{key}'")))?;
        if raw
            .insert(
                key,
                Raw {
                    lineno,
                    value: value.to_string(),
                },
            )
            .is_some()
        {
            return Err(err(lineno, format!("duplicate key '{key}'")));
        }
    }

    let get = |key: &str| raw.get(key);
    let parse_f64 = |key: &str| -> Result<Option<(usize, f64)>, String> {
        match get(key) {
            None => Ok(None),
            Some(r) => r
                .value
                .parse::<f64>()
                .map(|v| Some((r.lineno, v)))
                .map_err(|_| err(r.lineno, format!("{key} must be a number, got '{}'", r.value))),
        }
    };
    let parse_usize = |key: &str| -> Result<Option<(usize, usize)>, String> {
        match get(key) {
            None => Ok(None),
            Some(r) => r
                .value
                .parse::<usize>()
                .map(|v| Some((r.lineno, v)))
                .map_err(|_| err(r.lineno, format!("{key} must be an integer, got '{}'", r.value))),
        }
    };

    let command = match (command_override, get("command")) {
        (Some(c), _) => Command::parse(c)
            .ok_or_else(|| format!("unknown command '{c}'; valid: {}", Command::ALL.join(", ")))?,
        (None, Some(r)) => Command::parse(&r.value).ok_or_else(|| {
            err(
                r.lineno,
                format!("unknown command '{}'; valid: {}", r.value, Command::ALL.join(", ")),
            )
        })?,
        (None, None) => {
            return Err(format!(
                "no command given (config key 'command' or --command); valid: {}",
                Command::ALL.join(", ")
            ))
        }
    };

    // kernel spec
    let kernel = match (get("kernel"), get("kernel_file")) {
        (Some(r), Some(_)) => {
            return Err(err(r.lineno, "give either 'kernel' or 'kernel_file', not both"))
        }
        (Some(r), None) => {
            nlwave::kernel::builtin_kernel(&r.value).map_err(|e| err(r.lineno, e.to_string()))?;
            KernelSpec::Builtin(r.value.clone())
        }
        (None, Some(r)) => KernelSpec::File(r.value.clone()),
        (None, None) => match command {
            Command::Linearized => KernelSpec::Builtin("exponential".into()),
            Command::Crosscheck => KernelSpec::Builtin("triangular".into()),
            _ => KernelSpec::Builtin("dirac".into()),
        },
    };

    // grid, with command-aware defaults
    let (default_l, default_n) = match command {
        Command::Crosscheck => (16.0, 256),
        Command::Linearized => (std::f64::consts::PI, 128),
        _ => (20.0, 512),
    };
    let (l_line, half_length) = parse_f64("L")?.unwrap_or((0, default_l));
    if !(half_length > 0.0) {
        return Err(err(l_line, format!("L must be positive, got {half_length}")));
    }
    let (n_line, n_points) = parse_usize("N")?.unwrap_or((0, default_n));
    if n_points % 2 != 0 {
        return Err(err(n_line, format!("N must be even, got {n_points}")));
    }
    if n_points < 8 {
        return Err(err(n_line, format!("N must be at least 8, got {n_points}")));
    }
    if command == Command::Crosscheck {
        let inv_dx = n_points as f64 / (2.0 * half_length);
        if (inv_dx - inv_dx.round()).abs() > 1e-9 {
            return Err(err(
                n_line.max(l_line),
                format!("crosscheck needs 1/dx = N/(2L) integer, got {inv_dx}"),
            ));
        }
    }

    let (e_line, epsilon) = parse_f64("epsilon")?.unwrap_or((0, 0.1));
    if !(epsilon > 0.0) {
        return Err(err(e_line, format!("epsilon must be positive, got {epsilon}")));
    }
    let (p_line, power) = parse_usize("p")?.unwrap_or((0, 1));
    if !(1..=16).contains(&power) {
        return Err(err(p_line, format!("p must be in 1..=16, got {power}")));
    }
    let power = power as u32;
    let (s_line, sobolev_index) = parse_f64("s")?.unwrap_or((0, 2.0));
    if sobolev_index < 1.6 {
        return Err(err(
            s_line,
            format!("s must be at least 1.6, got {sobolev_index}"),
        ));
    }

    let dt = match get("dt") {
        None => None,
        Some(r) if r.value == "auto" => None,
        Some(r) => {
            let v = r
                .value
                .parse::<f64>()
                .map_err(|_| err(r.lineno, format!("dt must be a number or 'auto', got '{}'", r.value)))?;
            if !(v > 0.0) {
                return Err(err(r.lineno, format!("dt must be positive, got {v}")));
            }
            Some(v)
        }
    };

    let default_t_end = match command {
        Command::Crosscheck => 5.0,
        _ => 10.0,
    };
    let (te_line, t_end) = parse_f64("t_end")?.unwrap_or((0, default_t_end));
    if !(t_end >= 0.0) {
        return Err(err(te_line, format!("t_end must be nonnegative, got {t_end}")));
    }
    let (tc_line, t_cap) = parse_f64("T_cap")?.unwrap_or((0, 5.0));
    if !(t_cap > 0.0) {
        return Err(err(tc_line, format!("T_cap must be positive, got {t_cap}")));
    }
    let (m_line, escape_factor) = parse_f64("M")?.unwrap_or((0, 10.0));
    if !(escape_factor > 1.0) {
        return Err(err(
            m_line,
            format!("M must exceed 1, got {escape_factor}"),
        ));
    }

    let seed = match (seed_override, get("seed")) {
        (Some(s), _) => s,
        (None, Some(r)) => r
            .value
            .parse::<u64>()
            .map_err(|_| err(r.lineno, format!("seed must be a nonnegative integer, got '{}'", r.value)))?,
        (None, None) => 0,
    };

    let epsilon_list = match get("epsilon_list") {
        None => match command {
            Command::Linearized => vec![0.1, 0.05],
            _ => vec![0.2, 0.1, 0.05],
        },
        Some(r) => {
            let mut list = Vec::new();
            for tok in r.value.split(',') {
                let v = tok
                    .trim()
                    .parse::<f64>()
                    .map_err(|_| err(r.lineno, format!("epsilon_list entry '{tok}' is not a number")))?;
                if !(v > 0.0) {
                    return Err(err(r.lineno, "epsilon_list entries must be positive".to_string()));
                }
                list.push(v);
            }
            if list.is_empty() {
                return Err(err(r.lineno, "epsilon_list is empty".to_string()));
            }
            list
        }
    };

    let integrator = match get("integrator") {
        None => "strang".to_string(),
        Some(r) => {
            nlwave::dynamics::integrator_by_name(&r.value)
                .map_err(|e| err(r.lineno, e.to_string()))?;
            r.value.clone()
        }
    };

    let initial = match (get("initial"), get("initial_file")) {
        (Some(r), Some(_)) => {
            return Err(err(r.lineno, "give either 'initial' or 'initial_file', not both"))
        }
        (None, Some(r)) => InitialSpec::File(r.value.clone()),
        (maybe, None) => {
            let name = match (maybe, &command) {
                (Some(r), _) => r.value.as_str(),
                (None, Command::Linearized) => "sine",
                (None, _) => "gaussian",
            };
            match name {
                "gaussian" => InitialSpec::Gaussian,
                "sine" => InitialSpec::Sine,
                "zero" => InitialSpec::Zero,
                other => {
                    let lineno = maybe.map(|r| r.lineno).unwrap_or(0);
                    return Err(err(
                        lineno,
                        format!("unknown initial shape '{other}'; valid: gaussian, sine, zero"),
                    ));
                }
            }
        }
    };

    let (a_line, amplitude) = parse_f64("amplitude")?.unwrap_or((0, 1.0));
    if !amplitude.is_finite() {
        return Err(err(a_line, "amplitude must be finite".to_string()));
    }
    let (se_line, sample_every) = parse_usize("sample_every")?.unwrap_or((0, 10));
    if sample_every == 0 {
        return Err(err(se_line, "sample_every must be at least 1".to_string()));
    }

    let snapshots = match get("snapshots") {
        None => Vec::new(),
        Some(r) => {
            let mut list = Vec::new();
            for tok in r.value.split(',') {
                list.push(tok.trim().parse::<f64>().map_err(|_| {
                    err(r.lineno, format!("snapshots entry '{tok}' is not a number"))
                })?);
            }
            list
        }
    };

    let (sm_line, samples) = parse_usize("samples")?.unwrap_or((0, 1000));
    if samples == 0 {
        return Err(err(sm_line, "samples must be at least 1".to_string()));
    }

    let out_dir = match (out_override, get("out_dir")) {
        (Some(o), _) => o.to_string(),
        (None, Some(r)) => r.value.clone(),
        (None, None) => "out".to_string(),
    };

    Ok(RunConfig {
        command,
        kernel,
        half_length,
        n_points,
        epsilon,
        power,
        sobolev_index,
        dt,
        t_end,
        t_cap,
        escape_factor,
        seed,
        epsilon_list,
        integrator,
        initial,
        amplitude,
        sample_every,
        snapshots,
        samples: samples as u32,
        out_dir,
    })
}

impl RunConfig {
    /// Emits the full configuration as `key = value` lines that re-parse to
    /// an equal `RunConfig`.
    pub fn echo(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "command = {}", self.command.name());
        match &self.kernel {
            KernelSpec::Builtin(name) => {
                let _ = writeln!(s, "kernel = {name}");
            }
            KernelSpec::File(path) => {
                let _ = writeln!(s, "kernel_file = {path}");
            }
        }
        let _ = writeln!(s, "L = {}", self.half_length);
        let _ = writeln!(s, "N = {}", self.n_points);
        let _ = writeln!(s, "epsilon = {}", self.epsilon);
        let _ = writeln!(s, "p = {}", self.power);
        let _ = writeln!(s, "s = {}", self.sobolev_index);
        match self.dt {
            Some(dt) => {
                let _ = writeln!(s, "dt = {dt}");
            }
            None => {
                let _ = writeln!(s, "dt = auto");
            }
        }
        let _ = writeln!(s, "t_end = {}", self.t_end);
        let _ = writeln!(s, "T_cap = {}", self.t_cap);
        let _ = writeln!(s, "M = {}", self.escape_factor);
        let _ = writeln!(s, "seed = {}", self.seed);
        let eps_list: Vec<String> = self.epsilon_list.iter().map(|e| e.to_string()).collect();
        let _ = writeln!(s, "epsilon_list = {}", eps_list.join(","));
        let _ = writeln!(s, "integrator = {}", self.integrator);
        match &self.initial {
            InitialSpec::Gaussian => {
                let _ = writeln!(s, "initial = gaussian");
            }
            InitialSpec::Sine => {
                let _ = writeln!(s, "initial = sine");
            }
            InitialSpec::Zero => {
                let _ = writeln!(s, "initial = zero");
            }
            InitialSpec::File(path) => {
                let _ = writeln!(s, "initial_file = {path}");
            }
        }
        let _ = writeln!(s, "amplitude = {}", self.amplitude);
        let _ = writeln!(s, "sample_every = {}", self.sample_every);
        if !self.snapshots.is_empty() {
            let snaps: Vec<String> = self.snapshots.iter().map(|t| t.to_string()).collect();
            let _ = writeln!(s, "snapshots = {}", snaps.join(","));
        }
        let _ = writeln!(s, "samples = {}", self.samples);
        let _ = writeln!(s, "out_dir = {}", self.out_dir);
        s
    }
}
