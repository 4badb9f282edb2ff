"""Published component-loading matrices used as extraction fixtures.

Rows follow the canonical ratio order QR, CR, CCL, NPM, ROA, CPTI, ROE,
DER, DAR, PER, PBR; columns are PC1..PC4.
"""

import numpy as np

CD = np.array([
    [0.8885, -0.2441, -0.1309, -0.1369],
    [0.9775, -0.0172, -0.1393, -0.0261],
    [0.5454, 0.3073, 0.3860, -0.6576],
    [0.4540, 0.8279, -0.0078, 0.2826],
    [0.2508, 0.9159, 0.0049, 0.2801],
    [-0.2493, 0.8533, 0.2938, -0.0169],
    [-0.5865, 0.7787, 0.1791, -0.0373],
    [-0.7159, -0.5552, 0.2339, 0.0966],
    [-0.9343, -0.2002, 0.2488, -0.0675],
    [-0.6339, 0.1966, -0.6654, -0.1718],
    [-0.5358, 0.6158, -0.3746, -0.3327],
])
CD_COMM = [0.8849, 0.9759, 0.9734, 0.9716, 0.9802, 0.8769, 0.9839, 0.8848, 0.9794, 0.9127, 0.9173]
CD_CV_ROW = [0.4356, 0.7792, 0.8705, 0.9401]

ENERGY = np.array([
    [-0.9267, 0.0443, -0.3293, -0.0159],
    [-0.7734, 0.3095, -0.4831, -0.0592],
    [-0.9271, 0.1509, -0.3199, 0.0512],
    [-0.7117, 0.3077, 0.1476, -0.4258],
    [-0.8114, 0.2349, 0.4572, -0.1343],
    [-0.8958, -0.0007, 0.0191, 0.2529],
    [-0.1725, 0.4629, 0.7953, -0.0688],
    [-0.2436, 0.6389, 0.2140, 0.6076],
    [0.5648, 0.6838, -0.1598, 0.1275],
    [-0.3858, -0.8310, 0.0843, 0.2609],
    [-0.4787, -0.7479, 0.3557, 0.0705],
])
ENERGY_COMM = [0.9695, 0.9309, 0.9873, 0.8043, 0.9406, 0.8669, 0.8813, 0.8826, 0.8284, 0.9147, 0.9200]
ENERGY_CV_ROW = [0.4609, 0.6982, 0.8357, 0.9023]

FMCG = np.array([
    [0.8773, -0.3488, 0.2389, -0.0145],
    [0.8740, -0.2769, 0.3235, -0.0005],
    [0.8919, -0.2811, 0.2027, -0.0370],
    [0.2058, -0.5475, 0.5283, -0.0408],
    [-0.6120, -0.6399, 0.2576, -0.3053],
    [0.0684, 0.1720, -0.3624, -0.8324],
    [-0.6580, -0.6021, 0.2256, -0.3152],
    [-0.6509, 0.4137, 0.5515, 0.0653],
    [-0.6567, 0.3742, 0.5794, 0.0547],
    [-0.3401, -0.6079, -0.3974, 0.3841],
    [-0.5738, -0.7321, -0.2672, 0.1241],
])
FMCG_COMM = [0.9486, 0.9452, 0.9169, 0.6229, 0.9436, 0.8585, 0.9457, 0.9032, 0.9099, 0.7907, 0.9531]
# the loadings table prints 0.8553 as the last CV entry; the critical-ratio tables print 88.53%
FMCG_CV_ROW = [0.4076, 0.6435, 0.7889, 0.8553]

IT = np.array([
    [-0.8693, -0.0511, 0.0423, -0.4727],
    [-0.8846, -0.0887, 0.0953, -0.4249],
    [-0.8783, -0.0476, 0.0896, -0.4562],
    [-0.7575, 0.0245, 0.1520, 0.3992],
    [-0.8741, 0.0469, 0.1337, 0.2826],
    [0.5876, -0.1115, 0.2518, -0.4706],
    [-0.7924, 0.2379, 0.1444, 0.3921],
    [0.2174, 0.9110, 0.3194, -0.1065],
    [0.1854, 0.9099, 0.3392, -0.1083],
    [0.0503, 0.2616, -0.9440, -0.1440],
    [-0.4922, 0.5446, -0.6364, 0.0007],
])
IT_COMM = [0.9835, 0.9800, 0.9898, 0.7569, 0.8639, 0.6426, 0.8591, 0.9905, 0.9891, 0.9828, 0.9439]
IT_CV_ROW = [0.4497, 0.6413, 0.7920, 0.9075]

ALL_BSE = np.array([
    [0.8545, 0.4003, -0.1891, 0.1594],
    [0.8561, 0.3577, -0.1747, 0.2099],
    [0.8149, 0.3868, -0.2745, 0.0765],
    [0.8301, -0.4167, -0.0330, -0.1462],
    [0.6691, -0.6311, 0.1598, 0.0912],
    [0.5896, 0.2340, -0.4255, -0.5011],
    [0.6559, -0.5815, 0.1344, -0.0923],
    [-0.3616, 0.7535, -0.1806, -0.2608],
    [-0.4178, -0.2654, -0.6889, 0.1017],
    [-0.2069, -0.5821, -0.3829, -0.4210],
    [-0.2629, -0.3390, -0.7060, 0.3833],
])
ALL_BSE_PROP = [0.4054, 0.2268, 0.1381, 0.0697]

ALL_SP500 = np.array([
    [0.8037, -0.0388, 0.5774, -0.0273],
    [0.7949, -0.1062, 0.5656, -0.0203],
    [0.7466, 0.1750, 0.5814, 0.0253],
    [0.5826, 0.3395, -0.2295, 0.3387],
    [0.8670, -0.2939, -0.1760, -0.0604],
    [-0.3545, 0.4351, 0.1452, -0.7228],
    [0.5159, -0.6899, -0.2675, -0.0646],
    [-0.6486, -0.6232, 0.2301, -0.0505],
    [-0.7412, -0.5188, 0.3391, -0.0349],
    [0.6849, 0.0731, -0.3842, -0.3035],
    [0.7482, -0.3832, -0.2782, -0.2666],
])
ALL_SP500_PROP = [0.4834, 0.1564, 0.1419, 0.0739]

# Critical-ratio table rows: (rule A picks, rule B picks, CV percent).
EXPECTED = {
    "CD": (("CR", "ROA", "PER", "CCL"), ("CR", "ROE", "DAR", "PBR"), 94.01),
    "Energy": (("CCL", "PER", "ROE", "DER"), ("CCL", "ROA", "DER", "PBR"), 90.23),
    "FMCG": (("CCL", "PBR", "DAR", "CPTI"), ("QR", "ROE", "DAR", "PBR"), 88.53),
    "IT": (("CR", "DER", "PER", "QR"), ("CCL", "ROA", "DER", "PER"), 90.75),
}

LOADINGS = {"CD": CD, "Energy": ENERGY, "FMCG": FMCG, "IT": IT}
COMMUNALITIES = {"CD": CD_COMM, "Energy": ENERGY_COMM, "FMCG": FMCG_COMM, "IT": IT_COMM}
CV_ROWS = {"CD": CD_CV_ROW, "Energy": ENERGY_CV_ROW, "FMCG": FMCG_CV_ROW, "IT": IT_CV_ROW}


def published_cv(sector):
    """Cumulative variance row, with the final entry taken from the critical-ratio tables."""
    row = list(CV_ROWS[sector])
    row[-1] = EXPECTED[sector][2] / 100.0
    return row
