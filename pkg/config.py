# --- Spectrum Scenario ---
CHANNELS = 40  # L, number of channels the band is divided into
BANDWIDTH_HZ = 320e6  # W, total monitored bandwidth
FRAME_LEN = 200  # N, samples per coset per sensing frame (25 us at 8 MHz)
SUBCARRIERS = 200  # C, OFDM subcarriers per primary user
SNR_DB = 5.0  # total PU power over noise power
NOISE_VAR = 1.0  # sigma_n^2

# --- Quantizer ---
CLIP_SIGMA = 3.0  # b-bit range in multiples of the per-coset std (<1% clipping)
IDENTITY_BITS = 53  # at or above this depth the quantizer is the identity

# --- Detector ---
EFT_P_FALSE = 1e-3  # false alarm level of the exponential fitting test
EFT_MIN_TAIL = 2  # noise eigenvalues the exponential profile is fitted to, at least
EFT_CALIBRATION_RUNS = 1000  # noise-only covariances per threshold
EFT_CALIBRATION_BATCH = 200
EFT_CALIBRATION_SEED = 1729  # thresholds are deterministic for a given (size, N, p_false)
ORDER_METHOD = "eft"  # "eft", "mdl" or "aic"
COVARIANCE_DOMAIN = "aligned"  # "aligned" (frequency domain) or "time"
EIGEN_FLOOR = 1e-10  # eigenvalues below EIGEN_FLOOR * lambda_1 are treated as the floor
SOMP_MIN_REDUCTION = 1e-12  # SOMP stops when the residual drops by less than this fraction of ||U_s||_F

# --- Monte Carlo ---
TRIALS = 1000  # per sweep cell
MASTER_SEED = 20240101
THREADS_ENV_VAR = "ONEBIT_WSS_THREADS"  # fallback for --threads
CSV_FLOAT_FORMAT = "%.6f"
