//! Minimal SVG figures rendered from the CSV bundle.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::analysis::normalize_curve;
use crate::error::Result;

use super::csvio::{write_file, Table};

const PANEL_W: f64 = 220.0;
const PANEL_H: f64 = 160.0;
const MARGIN: f64 = 40.0;
const MAX_POINTS: usize = 400;

fn color(dynamics: &str) -> &'static str {
    match dynamics {
        "RW" => "#1f77b4",
        "RWD" => "#ff7f0e",
        "RWID" => "#2ca02c",
        "TSAW" => "#d62728",
        _ => "#555555",
    }
}

#[derive(Clone, Copy)]
struct Panel {
    x: f64,
    y: f64,
    w: f64,
    h: f64,
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Panel {
    fn new(x: f64, y: f64, w: f64, h: f64, xr: (f64, f64), yr: (f64, f64)) -> Panel {
        let pad = |(a, b): (f64, f64)| {
            if !(a.is_finite() && b.is_finite()) {
                (0.0, 1.0)
            } else if (b - a).abs() < 1e-300 {
                (a - 0.5, b + 0.5)
            } else {
                (a, b)
            }
        };
        let (x0, x1) = pad(xr);
        let (y0, y1) = pad(yr);
        Panel {
            x,
            y,
            w,
            h,
            x0,
            x1,
            y0,
            y1,
        }
    }

    fn px(&self, v: f64) -> f64 {
        self.x + (v - self.x0) / (self.x1 - self.x0) * self.w
    }

    fn py(&self, v: f64) -> f64 {
        self.y + self.h - (v - self.y0) / (self.y1 - self.y0) * self.h
    }

    fn frame(&self, svg: &mut String, title: &str) {
        let _ = writeln!(
            svg,
            r#"<rect x="{:.1}" y="{:.1}" width="{:.1}" height="{:.1}" fill="none" stroke="black"/>"#,
            self.x, self.y, self.w, self.h
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" font-size="11" text-anchor="middle">{}</text>"#,
            self.x + self.w / 2.0,
            self.y - 6.0,
            escape(title)
        );
        for (v, anchor, tx, ty) in [
            (self.x0, "start", self.x, self.y + self.h + 12.0),
            (self.x1, "end", self.x + self.w, self.y + self.h + 12.0),
        ] {
            let _ = writeln!(
                svg,
                r#"<text x="{tx:.1}" y="{ty:.1}" font-size="9" text-anchor="{anchor}">{}</text>"#,
                tick(v)
            );
        }
        for (v, ty) in [(self.y0, self.y + self.h), (self.y1, self.y + 9.0)] {
            let _ = writeln!(
                svg,
                r#"<text x="{:.1}" y="{ty:.1}" font-size="9" text-anchor="end">{}</text>"#,
                self.x - 3.0,
                tick(v)
            );
        }
    }

    fn line(&self, svg: &mut String, pts: &[(f64, f64)], stroke: &str) {
        if pts.is_empty() {
            return;
        }
        let mut d = String::new();
        for (x, y) in pts {
            let _ = write!(d, "{:.1},{:.1} ", self.px(*x), self.py(*y));
        }
        let _ = writeln!(
            svg,
            r#"<polyline points="{}" fill="none" stroke="{stroke}" stroke-width="1.2"/>"#,
            d.trim_end()
        );
    }

    fn band(&self, svg: &mut String, pts: &[(f64, f64, f64)], fill: &str) {
        if pts.is_empty() {
            return;
        }
        let mut d = String::new();
        for (x, m, s) in pts {
            let _ = write!(d, "{:.1},{:.1} ", self.px(*x), self.py(m + s));
        }
        for (x, m, s) in pts.iter().rev() {
            let _ = write!(d, "{:.1},{:.1} ", self.px(*x), self.py(m - s));
        }
        let _ = writeln!(
            svg,
            r#"<polygon points="{}" fill="{fill}" fill-opacity="0.15" stroke="none"/>"#,
            d.trim_end()
        );
    }
}

fn tick(v: f64) -> String {
    if v != 0.0 && (v.abs() < 1e-2 || v.abs() >= 1e4) {
        format!("{v:.1e}")
    } else {
        format!("{:.3}", v)
            .trim_end_matches('0')
            .trim_end_matches('.')
            .to_string()
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn document(width: f64, height: f64, body: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width:.0}\" height=\"{height:.0}\" viewBox=\"0 0 {width:.0} {height:.0}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{body}</svg>\n"
    )
}

fn legend(svg: &mut String, x: f64, y: f64, entries: &[(String, &str)]) {
    for (i, (label, c)) in entries.iter().enumerate() {
        let yy = y + i as f64 * 14.0;
        let _ = writeln!(
            svg,
            r#"<rect x="{x:.1}" y="{:.1}" width="10" height="10" fill="{c}"/><text x="{:.1}" y="{:.1}" font-size="10">{}</text>"#,
            yy - 9.0,
            x + 14.0,
            yy,
            escape(label)
        );
    }
}

fn glyph(svg: &mut String, model: &str, x: f64, y: f64, fill: &str) {
    let r = 4.0;
    let _ = match model {
        "BA" => writeln!(
            svg,
            r#"<rect x="{:.1}" y="{:.1}" width="{:.1}" height="{:.1}" fill="{fill}"/>"#,
            x - r,
            y - r,
            2.0 * r,
            2.0 * r
        ),
        "WAX" => writeln!(
            svg,
            r#"<polygon points="{:.1},{:.1} {:.1},{:.1} {:.1},{:.1}" fill="{fill}"/>"#,
            x,
            y - r,
            x - r,
            y + r,
            x + r,
            y + r
        ),
        "LFR" => writeln!(
            svg,
            r#"<polygon points="{:.1},{:.1} {:.1},{:.1} {:.1},{:.1} {:.1},{:.1}" fill="{fill}"/>"#,
            x,
            y - r,
            x + r,
            y,
            x,
            y + r,
            x - r,
            y
        ),
        _ => writeln!(svg, r#"<circle cx="{x:.1}" cy="{y:.1}" r="{r:.1}" fill="{fill}"/>"#),
    };
}

/// Insertion-ordered unique values.
fn uniq<T: PartialEq + Clone>(items: impl Iterator<Item = T>) -> Vec<T> {
    let mut out = Vec::new();
    for it in items {
        if !out.contains(&it) {
            out.push(it);
        }
    }
    out
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    values.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)))
}

fn decimate<T: Clone>(pts: &[T]) -> Vec<T> {
    if pts.len() <= MAX_POINTS {
        return pts.to_vec();
    }
    let stride = pts.len().div_ceil(MAX_POINTS);
    let mut out: Vec<T> = pts.iter().step_by(stride).cloned().collect();
    if !(pts.len() - 1).is_multiple_of(stride) {
        out.push(pts[pts.len() - 1].clone());
    }
    out
}

type Key = (String, String, String, String);

struct Curves {
    order: Vec<Key>,
    data: HashMap<Key, Vec<(f64, f64, f64)>>,
}

fn load_curves(table: &Table) -> Result<Curves> {
    let cols = [
        table.column("model")?,
        table.column("n")?,
        table.column("k")?,
        table.column("dynamics")?,
    ];
    let (cs, cm, csd) = (table.column("step")?, table.column("mean")?, table.column("std")?);
    let mut order = Vec::new();
    let mut data: HashMap<Key, Vec<(f64, f64, f64)>> = HashMap::new();
    for i in 0..table.rows.len() {
        let r = &table.rows[i];
        let key = (
            r[cols[0]].clone(),
            r[cols[1]].clone(),
            r[cols[2]].clone(),
            r[cols[3]].clone(),
        );
        let pt = (table.number(i, cs)?, table.number(i, cm)?, table.number(i, csd)?);
        data.entry(key.clone())
            .or_insert_with(|| {
                order.push(key);
                Vec::new()
            })
            .push(pt);
    }
    Ok(Curves { order, data })
}

fn grid_plot(
    curves: &Curves,
    n: &str,
    title: &str,
    yr: (f64, f64),
    series: impl Fn(&[(f64, f64, f64)]) -> (Vec<(f64, f64, f64)>, bool),
) -> String {
    let keys: Vec<&Key> = curves.order.iter().filter(|k| k.1 == n).collect();
    let models = uniq(keys.iter().map(|k| k.0.clone()));
    let ks = uniq(keys.iter().map(|k| k.2.clone()));
    let dyns = uniq(keys.iter().map(|k| k.3.clone()));
    let xr = range(keys.iter().flat_map(|k| curves.data[*k].iter().map(|p| p.0)));
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<text x="{MARGIN}" y="18" font-size="13">{}</text>"#,
        escape(title)
    );
    for (r, model) in models.iter().enumerate() {
        for (c, k) in ks.iter().enumerate() {
            let p = Panel::new(
                MARGIN + c as f64 * (PANEL_W + MARGIN),
                MARGIN + 10.0 + r as f64 * (PANEL_H + MARGIN),
                PANEL_W,
                PANEL_H,
                xr,
                yr,
            );
            p.frame(&mut svg, &format!("{model}  k={k}"));
            for d in &dyns {
                let key = (model.clone(), n.to_string(), k.clone(), d.clone());
                if let Some(pts) = curves.data.get(&key) {
                    let (pts, with_band) = series(pts);
                    let pts = decimate(&pts);
                    if with_band {
                        p.band(&mut svg, &pts, color(d));
                    }
                    let line: Vec<(f64, f64)> = pts.iter().map(|p| (p.0, p.1)).collect();
                    p.line(&mut svg, &line, color(d));
                }
            }
        }
    }
    let width = MARGIN + ks.len().max(1) as f64 * (PANEL_W + MARGIN) + 60.0;
    let height = MARGIN + 10.0 + models.len().max(1) as f64 * (PANEL_H + MARGIN);
    let entries: Vec<(String, &str)> = dyns.iter().map(|d| (d.clone(), color(d))).collect();
    legend(&mut svg, width - 90.0, MARGIN + 20.0, &entries);
    document(width, height, &svg)
}

fn curves_figure(curves: &Curves, n: &str) -> String {
    grid_plot(
        curves,
        n,
        &format!("coverage, N={n} (mean +/- std)"),
        (0.0, 1.0),
        |pts| (pts.to_vec(), true),
    )
}

fn rate_figure(features: &Table, n: &str) -> Result<String> {
    let (cm, cn, ck, cd) = (
        features.column("model")?,
        features.column("n")?,
        features.column("k")?,
        features.column("dynamics")?,
    );
    let fcols: Vec<usize> = (0..).map_while(|j| features.column(&format!("f{j}")).ok()).collect();
    let mut curves = Curves {
        order: Vec::new(),
        data: HashMap::new(),
    };
    for i in 0..features.rows.len() {
        let r = &features.rows[i];
        if r[cn] != n {
            continue;
        }
        let key = (r[cm].clone(), r[cn].clone(), r[ck].clone(), r[cd].clone());
        let mut pts = Vec::new();
        for (j, &c) in fcols.iter().enumerate() {
            pts.push(((j + 1) as f64, features.number(i, c)?, 0.0));
        }
        curves.order.push(key.clone());
        curves.data.insert(key, pts);
    }
    let yr = range(curves.data.values().flat_map(|v| v.iter().map(|p| p.1)));
    let yr = (yr.0.min(0.0), yr.1);
    Ok(grid_plot(
        &curves,
        n,
        &format!("coverage rate per window, N={n}"),
        yr,
        |pts| (pts.to_vec(), false),
    ))
}

fn normalized_figure(curves: &Curves, n: &str) -> String {
    let keys: Vec<&Key> = curves.order.iter().filter(|k| k.1 == n).collect();
    let xr = range(keys.iter().flat_map(|k| curves.data[*k].iter().map(|p| p.0)));
    let mut svg = String::new();
    let p = Panel::new(MARGIN + 10.0, MARGIN, 420.0, 300.0, xr, (0.0, 1.0));
    p.frame(&mut svg, &format!("normalized coverage, N={n}"));
    let mut dyns = Vec::new();
    for key in keys {
        let pts = &curves.data[key];
        let means: Vec<f64> = pts.iter().map(|p| p.1).collect();
        if let Ok(norm) = normalize_curve(&means) {
            let line: Vec<(f64, f64)> = pts.iter().zip(norm).map(|(p, v)| (p.0, v)).collect();
            p.line(&mut svg, &decimate(&line), color(&key.3));
        }
        if !dyns.contains(&key.3) {
            dyns.push(key.3.clone());
        }
    }
    let entries: Vec<(String, &str)> = dyns.iter().map(|d| (d.clone(), color(d))).collect();
    legend(&mut svg, 2.0 * MARGIN + 430.0, MARGIN + 10.0, &entries);
    document(2.0 * MARGIN + 520.0, 2.0 * MARGIN + 310.0, &svg)
}

fn pca_figure(table: Option<&Table>, n: &str) -> Result<String> {
    let mut pts = Vec::new();
    if let Some(t) = table {
        let (cm, cn, cd, c1, c2) = (
            t.column("model")?,
            t.column("n")?,
            t.column("dynamics")?,
            t.column("pc1")?,
            t.column("pc2")?,
        );
        for i in 0..t.rows.len() {
            let r = &t.rows[i];
            if r[cn] == n {
                pts.push((r[cm].clone(), r[cd].clone(), t.number(i, c1)?, t.number(i, c2)?));
            }
        }
    }
    let xr = range(pts.iter().map(|p| p.2));
    let yr = range(pts.iter().map(|p| p.3));
    let widen = |(a, b): (f64, f64)| {
        let pad = 0.05 * (b - a).abs().max(1e-12);
        (a - pad, b + pad)
    };
    let (xr, yr) = if pts.is_empty() {
        ((-1.0, 1.0), (-1.0, 1.0))
    } else {
        (widen(xr), widen(yr))
    };
    let mut svg = String::new();
    let p = Panel::new(MARGIN + 10.0, MARGIN, 360.0, 360.0, xr, yr);
    let title = if pts.is_empty() {
        format!("PCA, N={n} (no data)")
    } else {
        format!("PCA, N={n}")
    };
    p.frame(&mut svg, &title);
    for (model, d, x, y) in &pts {
        glyph(&mut svg, model, p.px(*x), p.py(*y), color(d));
    }
    let dyns = uniq(pts.iter().map(|p| p.1.clone()));
    let models = uniq(pts.iter().map(|p| p.0.clone()));
    let lx = 2.0 * MARGIN + 370.0;
    let entries: Vec<(String, &str)> = dyns.iter().map(|d| (d.clone(), color(d))).collect();
    legend(&mut svg, lx, MARGIN + 10.0, &entries);
    for (i, m) in models.iter().enumerate() {
        let y = MARGIN + 80.0 + i as f64 * 14.0;
        glyph(&mut svg, m, lx + 5.0, y - 4.0, "#333333");
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{y:.1}" font-size="10">{}</text>"#,
            lx + 14.0,
            escape(m)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" font-size="10" text-anchor="middle">PC1</text>"#,
        p.x + p.w / 2.0,
        p.y + p.h + 26.0
    );
    Ok(document(2.0 * MARGIN + 460.0, 2.0 * MARGIN + 380.0, &svg))
}

fn profile_figure(table: &Table, n: &str) -> Result<String> {
    let (ca, ce, cl) = (table.column("axis")?, table.column("epoch")?, table.column("loading")?);
    let mut axes: [Vec<(f64, f64)>; 2] = [Vec::new(), Vec::new()];
    for i in 0..table.rows.len() {
        let a = table.number(i, ca)? as usize;
        if (1..=2).contains(&a) {
            axes[a - 1].push((table.number(i, ce)?, table.number(i, cl)?));
        }
    }
    let mut svg = String::new();
    for (j, pts) in axes.iter().enumerate() {
        let xr = range(pts.iter().map(|p| p.0));
        let yr = range(pts.iter().map(|p| p.1).chain([0.0]));
        let p = Panel::new(MARGIN + 10.0 + j as f64 * 320.0, MARGIN, 260.0, 200.0, xr, yr);
        p.frame(&mut svg, &format!("PCA{} loadings, N={n}", j + 1));
        p.line(&mut svg, &[(p.x0, 0.0), (p.x1, 0.0)], "#bbbbbb");
        p.line(&mut svg, pts, "#1f77b4");
    }
    Ok(document(2.0 * MARGIN + 640.0, 2.0 * MARGIN + 220.0, &svg))
}

fn optional_table(path: &Path) -> Result<Option<Table>> {
    if path.exists() {
        Table::read(path).map(Some)
    } else {
        Ok(None)
    }
}

/// Renders per-N figures from the CSVs found in `input`, writing the SVGs to
/// `out`. `curves.csv` is required; the other tables are optional.
pub fn emit_plots_from(input: &Path, out: &Path) -> Result<Vec<PathBuf>> {
    let curves_table = Table::read(&input.join("curves.csv"))?;
    let curves = load_curves(&curves_table)?;
    let features = optional_table(&input.join("features.csv"))?;
    let pca = optional_table(&input.join("pca.csv"))?;
    let ns = uniq(curves.order.iter().map(|k| k.1.clone()));
    let mut files = Vec::new();
    let mut put = |name: String, svg: String| -> Result<()> {
        let path = out.join(name);
        write_file(&path, &svg)?;
        files.push(path);
        Ok(())
    };
    for n in &ns {
        put(format!("curves_n{n}.svg"), curves_figure(&curves, n))?;
        put(format!("normalized_n{n}.svg"), normalized_figure(&curves, n))?;
        if let Some(f) = &features {
            put(format!("rates_n{n}.svg"), rate_figure(f, n)?)?;
        }
        put(format!("pca_n{n}.svg"), pca_figure(pca.as_ref(), n)?)?;
        if let Some(t) = optional_table(&input.join(format!("profiles_n{n}.csv")))? {
            put(format!("profiles_n{n}.svg"), profile_figure(&t, n)?)?;
        }
    }
    Ok(files)
}

pub fn emit_plots(dir: &Path) -> Result<Vec<PathBuf>> {
    emit_plots_from(dir, dir)
}
