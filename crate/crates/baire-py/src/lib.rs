use pyo3::prelude::*;

#[pymodule]
fn baire_py(_m: &Bound<PyModule>) -> PyResult<()> { Ok(()) }
