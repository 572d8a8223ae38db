use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub episode: usize,
    #[serde(rename = "return")]
    pub ret: i64,
    pub length: u32,
}

/// Per-episode training returns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LearningCurve {
    pub points: Vec<CurvePoint>,
    pub window: usize,
}

impl LearningCurve {
    pub fn new(window: usize) -> LearningCurve {
        LearningCurve {
            points: Vec::new(),
            window: window.max(1),
        }
    }

    pub fn push(&mut self, ret: i64, length: u32) {
        let episode = self.points.len();
        self.points.push(CurvePoint {
            episode,
            ret,
            length,
        });
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Trailing mean over the last `window` returns at each full window.
    pub fn rolling_mean(&self) -> Vec<f64> {
        let w = self.window;
        if self.points.len() < w {
            return Vec::new();
        }
        let mut out = Vec::with_capacity(self.points.len() - w + 1);
        let mut sum: i64 = self.points[..w].iter().map(|p| p.ret).sum();
        out.push(sum as f64 / w as f64);
        for i in w..self.points.len() {
            sum += self.points[i].ret - self.points[i - w].ret;
            out.push(sum as f64 / w as f64);
        }
        out
    }

    /// Highest rolling mean and the final one.
    pub fn peak_and_final(&self) -> Option<(f64, f64)> {
        let m = self.rolling_mean();
        let last = *m.last()?;
        Some((m.iter().copied().fold(f64::NEG_INFINITY, f64::max), last))
    }

    /// CSV with header `episode,return,length`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(out);
        for p in &self.points {
            w.serialize(p)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(input: R, window: usize) -> Result<LearningCurve, csv::Error> {
        let mut r = csv::Reader::from_reader(input);
        let points = r.deserialize().collect::<Result<Vec<CurvePoint>, _>>()?;
        Ok(LearningCurve {
            points,
            window: window.max(1),
        })
    }
}
