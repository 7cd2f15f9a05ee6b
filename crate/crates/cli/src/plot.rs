//! Gnuplot scripts for the CSV outputs. Scripts use paths relative to the
//! output directory and are meant to be run from there:
//! `cd out/bench-step && gnuplot plot.gp`.

pub struct Series {
    pub file: String,
    /// Gnuplot `using` expression, e.g. `1:($3*180/pi)`.
    pub using: String,
    pub title: String,
}

impl Series {
    pub fn new(file: impl Into<String>, using: impl Into<String>, title: impl Into<String>) -> Self {
        Self {
            file: file.into(),
            using: using.into(),
            title: title.into(),
        }
    }
}

pub struct Panel {
    pub title: String,
    pub xlabel: String,
    pub ylabel: String,
    pub logx: bool,
    pub series: Vec<Series>,
}

impl Panel {
    pub fn new(title: impl Into<String>, xlabel: &str, ylabel: &str) -> Self {
        Self {
            title: title.into(),
            xlabel: xlabel.into(),
            ylabel: ylabel.into(),
            logx: false,
            series: Vec::new(),
        }
    }
}

fn quote(s: &str) -> String {
    format!("'{}'", s.replace('\'', "''"))
}

/// Stacked panels sharing one PNG.
pub fn script(png: &str, panels: &[Panel]) -> String {
    let mut s = String::new();
    s.push_str("set datafile separator ','\n");
    s.push_str(&format!("set terminal pngcairo size 900,{}\n", 280 * panels.len().max(1)));
    s.push_str(&format!("set output {}\n", quote(png)));
    s.push_str("set grid\nset key outside right\n");
    s.push_str(&format!("set multiplot layout {},1\n", panels.len().max(1)));
    for p in panels {
        s.push_str(&format!("set title {}\n", quote(&p.title)));
        s.push_str(&format!("set xlabel {}\nset ylabel {}\n", quote(&p.xlabel), quote(&p.ylabel)));
        s.push_str(if p.logx { "set logscale x\n" } else { "unset logscale x\n" });
        if p.series.is_empty() {
            continue;
        }
        let lines: Vec<String> = p
            .series
            .iter()
            .map(|x| format!("{} using {} skip 1 with lines title {}", quote(&x.file), x.using, quote(&x.title)))
            .collect();
        s.push_str(&format!("plot {}\n", lines.join(", \\\n     ")));
    }
    s.push_str("unset multiplot\n");
    s
}
