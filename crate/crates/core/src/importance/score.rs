use crate::trace::StageTrace;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ImportanceMethod {
    PdSd,
    Firm,
    PfiPermutation,
    PfiExhaustive,
    Sfimp,
}

impl ImportanceMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            ImportanceMethod::PdSd => "pd_sd",
            ImportanceMethod::Firm => "firm",
            ImportanceMethod::PfiPermutation => "pfi_permutation",
            ImportanceMethod::PfiExhaustive => "pfi_exhaustive",
            ImportanceMethod::Sfimp => "sfimp",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImportanceScore<T> {
    pub method: ImportanceMethod,
    pub feature: usize,
    pub value: T,
    /// Loss tag for performance-based methods.
    pub loss: Option<&'static str>,
    pub seed: Option<u64>,
    pub repeats: Option<usize>,
    /// Per-repeat values when the score is an average of randomized repeats.
    pub replicates: Vec<T>,
    pub trace: StageTrace,
}

impl<T> ImportanceScore<T> {
    pub(crate) fn plain(method: ImportanceMethod, feature: usize, value: T, trace: StageTrace) -> Self {
        Self {
            method,
            feature,
            value,
            loss: None,
            seed: None,
            repeats: None,
            replicates: Vec::new(),
            trace,
        }
    }
}
