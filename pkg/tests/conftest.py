import os

# single-threaded BLAS: deterministic and faster at these matrix sizes
os.environ.setdefault("OPENBLAS_NUM_THREADS", "1")
os.environ.setdefault("OMP_NUM_THREADS", "1")
