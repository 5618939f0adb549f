//! `plot`: SVG line charts from metrics, repeat and trace CSVs.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{CliError, CliResult};
use crate::metrics_cmd::METRICS_HEADER;
use crate::output;
use crate::svg::{Chart, Point, Series};
use crate::vqe_cmd::{REPEATS_HEADER, TRACE_HEADER};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlotConfig {
    pub version: u32,
    /// CSV to plot; relative paths resolve against the config file's directory.
    pub input: PathBuf,
    #[serde(default)]
    pub x: Option<String>,
    #[serde(default)]
    pub y: Option<String>,
    #[serde(default)]
    pub log_y: bool,
    #[serde(default)]
    pub prefix: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Schema {
    Metrics,
    Repeats,
    Trace,
}

impl Schema {
    fn detect(header: &[String]) -> CliResult<Self> {
        let is = |h: &[&str]| header.len() == h.len() && header.iter().zip(h).all(|(a, b)| a == b);
        if is(&METRICS_HEADER) {
            Ok(Schema::Metrics)
        } else if is(&REPEATS_HEADER) {
            Ok(Schema::Repeats)
        } else if is(&TRACE_HEADER) {
            Ok(Schema::Trace)
        } else {
            Err(CliError::config(format!("unrecognised CSV header: {}", header.join(","))))
        }
    }

    fn axes(self) -> (&'static [&'static str], &'static [&'static str], &'static str, &'static str) {
        // (allowed x, allowed y, default x, default y)
        match self {
            Schema::Metrics => (&["L", "n", "n_cz", "l_cz"], &["value"], "L", "value"),
            Schema::Repeats => {
                (&["L", "n", "param", "steps"], &["final_energy", "final_v_score"], "L", "final_v_score")
            }
            Schema::Trace => (&["step"], &["energy", "e_var", "v_score"], "step", "v_score"),
        }
    }
}

struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn col(&self, name: &str) -> usize {
        self.header.iter().position(|h| h == name).expect("schema column")
    }
}

fn read_table(path: &Path) -> CliResult<Table> {
    let mut r = csv::Reader::from_path(path).map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    let rows = r
        .records()
        .map(|rec| rec.map(|rec| rec.iter().map(str::to_string).collect()))
        .collect::<Result<Vec<Vec<String>>, _>>()?;
    Ok(Table { header, rows })
}

fn number(s: &str, what: &str) -> CliResult<f64> {
    s.parse().map_err(|_| CliError::config(format!("column {what}: {s:?} is not a number")))
}

/// Mean and population standard deviation.
fn mean_std(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    (m, (v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / n).sqrt())
}

type Groups = BTreeMap<String, BTreeMap<String, BTreeMap<u64, (f64, Vec<f64>)>>>;

/// chart key -> series label -> x (by bit pattern of a non-negative float) -> samples.
fn push(groups: &mut Groups, chart: String, series: String, x: f64, y: f64) {
    groups.entry(chart).or_default().entry(series).or_default().entry(x.to_bits()).or_insert((x, Vec::new())).1.push(y);
}

fn charts_from(groups: Groups, x: &str, y: &str, log_y: bool, with_err: bool) -> Vec<(String, Chart)> {
    groups
        .into_iter()
        .map(|(key, series)| {
            let series = series
                .into_iter()
                .map(|(label, pts)| {
                    let mut points: Vec<Point> = pts
                        .into_values()
                        .map(|(xv, ys)| {
                            let (m, s) = mean_std(&ys);
                            Point { x: xv, y: m, err: if with_err { s } else { 0.0 } }
                        })
                        .collect();
                    points.sort_by(|a, b| a.x.total_cmp(&b.x));
                    Series { label, points }
                })
                .collect();
            let chart = Chart { title: key.clone(), x_label: x.into(), y_label: y.into(), log_y, series };
            (key, chart)
        })
        .collect()
}

fn distinct(t: &Table, col: &str) -> usize {
    let c = t.col(col);
    t.rows.iter().map(|r| r[c].as_str()).collect::<std::collections::BTreeSet<_>>().len()
}

/// Builds one chart per metric (metrics CSV) or per problem (repeat and trace CSVs).
pub fn charts(cfg: &PlotConfig, input: &Path) -> CliResult<Vec<(String, Chart)>> {
    let t = read_table(input)?;
    let schema = Schema::detect(&t.header)?;
    if t.rows.is_empty() {
        return Err(CliError::config(format!("{} has no data rows", input.display())));
    }
    let (xs, ys, dx, dy) = schema.axes();
    let x = cfg.x.as_deref().unwrap_or(dx);
    let y = cfg.y.as_deref().unwrap_or(dy);
    if !xs.contains(&x) {
        return Err(CliError::config(format!("x = {x:?} not one of {xs:?}")));
    }
    if !ys.contains(&y) {
        return Err(CliError::config(format!("y = {y:?} not one of {ys:?}")));
    }
    let (cx, cy) = (t.col(x), t.col(y));
    let mut groups = Groups::new();
    let charts = match schema {
        Schema::Metrics => {
            let (arch, metric, l) = (t.col("arch"), t.col("metric"), t.col("L"));
            for r in &t.rows {
                if r[cx].is_empty() {
                    continue;
                }
                let label = if x == "L" { r[arch].clone() } else { format!("{} L={}", r[arch], r[l]) };
                push(&mut groups, r[metric].clone(), label, number(&r[cx], x)?, number(&r[cy], y)?);
            }
            charts_from(groups, x, y, cfg.log_y, true)
        }
        Schema::Repeats => {
            let (problem, arch, rep) = (t.col("problem"), t.col("arch"), t.col("rep"));
            let extra: Vec<&str> =
                ["L", "param", "steps"].into_iter().filter(|&c| c != x && distinct(&t, c) > 1).collect();
            let mut vars: BTreeMap<(String, String, u64), f64> = BTreeMap::new();
            for r in &t.rows {
                let mut label = r[arch].clone();
                for c in &extra {
                    label.push_str(&format!(" {c}={}", r[t.col(c)]));
                }
                let key = format!("{} {y}", r[problem]);
                match r[rep].as_str() {
                    "mean" if !r[cy].is_empty() => {
                        push(&mut groups, key, label, number(&r[cx], x)?, number(&r[cy], y)?);
                    }
                    "var" if !r[cy].is_empty() => {
                        vars.insert((key, label, number(&r[cx], x)?.to_bits()), number(&r[cy], y)?);
                    }
                    _ => {}
                }
            }
            let mut out = charts_from(groups, x, y, cfg.log_y, false);
            for (key, chart) in &mut out {
                for s in &mut chart.series {
                    for p in &mut s.points {
                        if let Some(v) = vars.get(&(key.clone(), s.label.clone(), p.x.to_bits())) {
                            p.err = v.max(0.0).sqrt();
                        }
                    }
                }
            }
            out
        }
        Schema::Trace => {
            let (problem, arch, l, param) = (t.col("problem"), t.col("arch"), t.col("L"), t.col("param"));
            for r in &t.rows {
                if r[cy].is_empty() {
                    continue;
                }
                let label = format!("{} L={} p={}", r[arch], r[l], r[param]);
                push(&mut groups, format!("{} {y}", r[problem]), label, number(&r[cx], x)?, number(&r[cy], y)?);
            }
            charts_from(groups, x, y, cfg.log_y, true)
        }
    };
    if charts.is_empty() {
        return Err(CliError::config(format!("{} has no plottable rows for {y}", input.display())));
    }
    Ok(charts)
}

fn file_stem(key: &str) -> String {
    key.chars().map(|c| if c.is_ascii_alphanumeric() || c == '_' { c } else { '_' }).collect()
}

/// `config_dir` resolves a relative `input`.
pub fn run(cfg: &PlotConfig, config_dir: &Path, out_dir: &Path) -> CliResult<Vec<PathBuf>> {
    let input = if cfg.input.is_absolute() { cfg.input.clone() } else { config_dir.join(&cfg.input) };
    let prefix = cfg.prefix.clone().unwrap_or_else(|| "plot_".into());
    let mut written = Vec::new();
    for (key, chart) in charts(cfg, &input)? {
        let svg = chart.render().ok_or_else(|| CliError::config(format!("chart {key:?} has no drawable points")))?;
        let path = out_dir.join(format!("{prefix}{}.svg", file_stem(&key)));
        output::write_text(&path, &svg)?;
        written.push(path);
    }
    Ok(written)
}
