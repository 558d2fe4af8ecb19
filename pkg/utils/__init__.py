# Utilidades numéricas, de E/S y de API
from utils.spectrum_utils import mors, coherent_sum
from utils.fit_utils import fit, initialize
from utils.io_utils import read_trace_csv, write_trace_csv
