use pyo3::prelude::*;

#[pymodule]
fn bidisc_rank_py(_m: &Bound<'_, PyModule>) -> PyResult<()> {
    Ok(())
}
