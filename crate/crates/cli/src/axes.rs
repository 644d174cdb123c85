//! Axis specs: either "start:stop:count" (inclusive linear spacing) or a
//! comma-separated list of values.

pub fn parse_axis(spec: &str) -> Result<Vec<f64>, String> {
    let spec = spec.trim();
    if spec.is_empty() {
        return Err("empty axis spec".into());
    }
    if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("axis spec '{spec}' is not start:stop:count"));
        }
        let start: f64 = parts[0]
            .trim()
            .parse()
            .map_err(|_| format!("bad axis start '{}'", parts[0]))?;
        let stop: f64 = parts[1]
            .trim()
            .parse()
            .map_err(|_| format!("bad axis stop '{}'", parts[1]))?;
        let count: usize = parts[2]
            .trim()
            .parse()
            .map_err(|_| format!("bad axis count '{}'", parts[2]))?;
        if count == 0 {
            return Err("axis count must be at least 1".into());
        }
        if count == 1 {
            if start != stop {
                return Err("single-point axis needs start = stop".into());
            }
            return Ok(vec![start]);
        }
        let step = (stop - start) / (count - 1) as f64;
        Ok((0..count)
            .map(|i| {
                if i == count - 1 {
                    stop
                } else {
                    start + i as f64 * step
                }
            })
            .collect())
    } else {
        spec.split(',')
            .map(|tok| {
                tok.trim()
                    .parse::<f64>()
                    .map_err(|_| format!("bad axis value '{tok}'"))
            })
            .collect()
    }
}

pub fn parse_n_series(spec: &str) -> Result<Vec<usize>, String> {
    spec.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<usize>()
                .map_err(|_| format!("bad atom number '{tok}'"))
        })
        .collect()
}
