//! Minimal SVG 1.1 writer with a world-to-pixel viewport map and clipping.

use std::fmt::Write;

use ratsys_core::{LineEq, Point};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Viewport {
    pub xmin: f64,
    pub xmax: f64,
    pub ymin: f64,
    pub ymax: f64,
}

impl Viewport {
    pub fn new([xmin, xmax, ymin, ymax]: [f64; 4]) -> Option<Viewport> {
        let ok =
            [xmin, xmax, ymin, ymax].iter().all(|v| v.is_finite()) && xmin < xmax && ymin < ymax;
        ok.then_some(Viewport {
            xmin,
            xmax,
            ymin,
            ymax,
        })
    }

    pub fn contains(&self, z: &Point) -> bool {
        (self.xmin..=self.xmax).contains(&z.x) && (self.ymin..=self.ymax).contains(&z.y)
    }

    pub fn diagonal(&self) -> f64 {
        (self.xmax - self.xmin).hypot(self.ymax - self.ymin)
    }

    /// The part of an infinite line inside the viewport.
    pub fn clip_line(&self, l: &LineEq) -> Option<(Point, Point)> {
        let mut pts: Vec<Point> = Vec::new();
        if l.b != 0.0 {
            for x in [self.xmin, self.xmax] {
                pts.push(Point::new(x, -(l.a * x + l.c) / l.b));
            }
        }
        if l.a != 0.0 {
            for y in [self.ymin, self.ymax] {
                pts.push(Point::new(-(l.b * y + l.c) / l.a, y));
            }
        }
        let eps = 1e-12 * self.diagonal();
        pts.retain(|z| {
            z.x >= self.xmin - eps
                && z.x <= self.xmax + eps
                && z.y >= self.ymin - eps
                && z.y <= self.ymax + eps
        });
        let (mut best, mut d) = (None, 0.0);
        for (i, a) in pts.iter().enumerate() {
            for b in &pts[i + 1..] {
                if a.dist(b) > d {
                    d = a.dist(b);
                    best = Some((*a, *b));
                }
            }
        }
        best
    }

    /// Maximal runs of consecutive points inside the viewport.
    pub fn runs(&self, pts: &[Point]) -> Vec<Vec<Point>> {
        let mut out = Vec::new();
        let mut cur = Vec::new();
        for z in pts {
            if z.is_finite() && self.contains(z) {
                cur.push(*z);
            } else if !cur.is_empty() {
                out.push(std::mem::take(&mut cur));
            }
        }
        if !cur.is_empty() {
            out.push(cur);
        }
        out
    }
}

pub struct Canvas {
    pub view: Viewport,
    pub size: u32,
    body: String,
}

fn c(v: f64) -> String {
    let s = format!("{v:.6}");
    if s == "-0.000000" {
        "0.000000".into()
    } else {
        s
    }
}

impl Canvas {
    pub fn new(view: Viewport, size: u32) -> Canvas {
        Canvas {
            view,
            size,
            body: String::new(),
        }
    }

    pub fn px(&self, z: &Point) -> (f64, f64) {
        let v = &self.view;
        let s = self.size as f64;
        (
            (z.x - v.xmin) / (v.xmax - v.xmin) * s,
            (v.ymax - z.y) / (v.ymax - v.ymin) * s,
        )
    }

    fn pair(&self, z: &Point) -> String {
        let (x, y) = self.px(z);
        format!("{},{}", c(x), c(y))
    }

    pub fn comment(&mut self, text: &str) {
        let _ = writeln!(self.body, "<!-- {} -->", text.replace("--", "- -"));
    }

    pub fn line(&mut self, l: &LineEq, class: &str, dashed: bool) {
        if let Some((a, b)) = self.view.clip_line(l) {
            let (x1, y1) = self.px(&a);
            let (x2, y2) = self.px(&b);
            let dash = if dashed {
                " stroke-dasharray=\"8,5\""
            } else {
                ""
            };
            let _ = writeln!(
                self.body,
                "<line class=\"{class}\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"{dash}/>",
                c(x1),
                c(y1),
                c(x2),
                c(y2)
            );
        }
    }

    pub fn polyline(&mut self, pts: &[Point], class: &str) {
        for run in self.view.runs(pts).iter().filter(|r| r.len() > 1) {
            let coords: Vec<String> = run.iter().map(|z| self.pair(z)).collect();
            let _ = writeln!(
                self.body,
                "<polyline class=\"{class}\" points=\"{}\"/>",
                coords.join(" ")
            );
        }
    }

    pub fn path(&mut self, pts: &[Point], class: &str) {
        for run in self.view.runs(pts).iter().filter(|r| r.len() > 1) {
            let mut d = String::new();
            for (i, z) in run.iter().enumerate() {
                let (x, y) = self.px(z);
                let _ = write!(d, "{}{} {}", if i == 0 { "M" } else { " L" }, c(x), c(y));
            }
            let _ = writeln!(self.body, "<path class=\"{class}\" d=\"{d}\"/>");
        }
    }

    pub fn marker(&mut self, z: &Point, r: f64, class: &str) {
        if self.view.contains(z) {
            let (x, y) = self.px(z);
            let _ = writeln!(
                self.body,
                "<circle class=\"{class}\" cx=\"{}\" cy=\"{}\" r=\"{}\"/>",
                c(x),
                c(y),
                c(r)
            );
        }
    }

    pub fn finish(self) -> String {
        let s = self.size;
        let v = self.view;
        let mut out = String::new();
        out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
        let _ = writeln!(
            out,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{s}\" height=\"{s}\" \
             viewBox=\"0 0 {s} {s}\" data-viewport=\"{},{},{},{}\">",
            v.xmin, v.xmax, v.ymin, v.ymax
        );
        out.push_str(
            "<style>\
             .frame{fill:white;stroke:#888}\
             .axis{stroke:#bbb;stroke-width:1}\
             .line-l{stroke:#c03;stroke-width:1.5;fill:none}\
             .line-parallel{stroke:#36c;stroke-width:1.5;fill:none}\
             .equilibrium-line{stroke:#090;stroke-width:1.5}\
             .conic{stroke:#960;stroke-width:1.2;fill:none}\
             .orbit{stroke:#555;stroke-width:0.4;fill:none;opacity:0.5}\
             .orbit-point{fill:#222}\
             .equilibrium{fill:#090;stroke:black}\
             </style>\n",
        );
        let _ = writeln!(
            out,
            "<rect class=\"frame\" x=\"0\" y=\"0\" width=\"{s}\" height=\"{s}\"/>"
        );
        out.push_str(&self.body);
        out.push_str("</svg>\n");
        out
    }
}
