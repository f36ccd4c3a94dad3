// CIE 1931 2° colour-matching functions, 360–780 nm in 5 nm steps.
pub(crate) const CMF_START_NM: f64 = 360.0;
pub(crate) const CMF_STEP_NM: f64 = 5.0;
#[rustfmt::skip]
pub(crate) const CMF_1931: [[f64; 3]; 85] = [
    [1.299000e-04, 3.917000e-06, 6.061000e-04], // 360
    [2.321000e-04, 6.965000e-06, 1.086000e-03], // 365
    [4.149000e-04, 1.239000e-05, 1.946000e-03], // 370
    [7.416000e-04, 2.202000e-05, 3.486000e-03], // 375
    [1.368000e-03, 3.900000e-05, 6.450001e-03], // 380
    [2.236000e-03, 6.400000e-05, 1.054999e-02], // 385
    [4.243000e-03, 1.200000e-04, 2.005001e-02], // 390
    [7.650000e-03, 2.170000e-04, 3.621000e-02], // 395
    [1.431000e-02, 3.960000e-04, 6.785001e-02], // 400
    [2.319000e-02, 6.400000e-04, 1.102000e-01], // 405
    [4.351000e-02, 1.210000e-03, 2.074000e-01], // 410
    [7.763000e-02, 2.180000e-03, 3.713000e-01], // 415
    [1.343800e-01, 4.000000e-03, 6.456000e-01], // 420
    [2.147700e-01, 7.300000e-03, 1.039050e+00], // 425
    [2.839000e-01, 1.160000e-02, 1.385600e+00], // 430
    [3.285000e-01, 1.684000e-02, 1.622960e+00], // 435
    [3.482800e-01, 2.300000e-02, 1.747060e+00], // 440
    [3.480600e-01, 2.980000e-02, 1.782600e+00], // 445
    [3.362000e-01, 3.800000e-02, 1.772110e+00], // 450
    [3.187000e-01, 4.800000e-02, 1.744100e+00], // 455
    [2.908000e-01, 6.000000e-02, 1.669200e+00], // 460
    [2.511000e-01, 7.390000e-02, 1.528100e+00], // 465
    [1.953600e-01, 9.098000e-02, 1.287640e+00], // 470
    [1.421000e-01, 1.126000e-01, 1.041900e+00], // 475
    [9.564000e-02, 1.390200e-01, 8.129501e-01], // 480
    [5.795001e-02, 1.693000e-01, 6.162000e-01], // 485
    [3.201000e-02, 2.080200e-01, 4.651800e-01], // 490
    [1.470000e-02, 2.586000e-01, 3.533000e-01], // 495
    [4.900000e-03, 3.230000e-01, 2.720000e-01], // 500
    [2.400000e-03, 4.073000e-01, 2.123000e-01], // 505
    [9.300000e-03, 5.030000e-01, 1.582000e-01], // 510
    [2.910000e-02, 6.082000e-01, 1.117000e-01], // 515
    [6.327000e-02, 7.100000e-01, 7.824999e-02], // 520
    [1.096000e-01, 7.932000e-01, 5.725001e-02], // 525
    [1.655000e-01, 8.620000e-01, 4.216000e-02], // 530
    [2.257499e-01, 9.148501e-01, 2.984000e-02], // 535
    [2.904000e-01, 9.540000e-01, 2.030000e-02], // 540
    [3.597000e-01, 9.803000e-01, 1.340000e-02], // 545
    [4.334499e-01, 9.949501e-01, 8.749999e-03], // 550
    [5.120501e-01, 1.000000e+00, 5.749999e-03], // 555
    [5.945000e-01, 9.950000e-01, 3.900000e-03], // 560
    [6.784000e-01, 9.786000e-01, 2.749999e-03], // 565
    [7.621000e-01, 9.520000e-01, 2.100000e-03], // 570
    [8.425000e-01, 9.154000e-01, 1.800000e-03], // 575
    [9.163000e-01, 8.700000e-01, 1.650001e-03], // 580
    [9.786000e-01, 8.163000e-01, 1.400000e-03], // 585
    [1.026300e+00, 7.570000e-01, 1.100000e-03], // 590
    [1.056700e+00, 6.949000e-01, 1.000000e-03], // 595
    [1.062200e+00, 6.310000e-01, 8.000000e-04], // 600
    [1.045600e+00, 5.668000e-01, 6.000000e-04], // 605
    [1.002600e+00, 5.030000e-01, 3.400000e-04], // 610
    [9.384000e-01, 4.412000e-01, 2.400000e-04], // 615
    [8.544499e-01, 3.810000e-01, 1.900000e-04], // 620
    [7.514000e-01, 3.210000e-01, 1.000000e-04], // 625
    [6.424000e-01, 2.650000e-01, 4.999999e-05], // 630
    [5.419000e-01, 2.170000e-01, 3.000000e-05], // 635
    [4.479000e-01, 1.750000e-01, 2.000000e-05], // 640
    [3.608000e-01, 1.382000e-01, 1.000000e-05], // 645
    [2.835000e-01, 1.070000e-01, 2.117582e-22], // 650
    [2.187000e-01, 8.160000e-02, 0.000000e+00], // 655
    [1.649000e-01, 6.100000e-02, 0.000000e+00], // 660
    [1.212000e-01, 4.458000e-02, 0.000000e+00], // 665
    [8.740000e-02, 3.200000e-02, 0.000000e+00], // 670
    [6.360000e-02, 2.320000e-02, 0.000000e+00], // 675
    [4.677000e-02, 1.700000e-02, 0.000000e+00], // 680
    [3.290000e-02, 1.192000e-02, 0.000000e+00], // 685
    [2.270000e-02, 8.210000e-03, 0.000000e+00], // 690
    [1.584000e-02, 5.723000e-03, 0.000000e+00], // 695
    [1.135916e-02, 4.102000e-03, 0.000000e+00], // 700
    [8.110916e-03, 2.929000e-03, 0.000000e+00], // 705
    [5.790346e-03, 2.091000e-03, 0.000000e+00], // 710
    [4.109457e-03, 1.484000e-03, 0.000000e+00], // 715
    [2.899327e-03, 1.047000e-03, 0.000000e+00], // 720
    [2.049190e-03, 7.400000e-04, 0.000000e+00], // 725
    [1.439971e-03, 5.200000e-04, 0.000000e+00], // 730
    [9.999493e-04, 3.611000e-04, 0.000000e+00], // 735
    [6.900786e-04, 2.492000e-04, 0.000000e+00], // 740
    [4.760213e-04, 1.719000e-04, 0.000000e+00], // 745
    [3.323011e-04, 1.200000e-04, 0.000000e+00], // 750
    [2.348261e-04, 8.480000e-05, 0.000000e+00], // 755
    [1.661505e-04, 6.000000e-05, 0.000000e+00], // 760
    [1.174130e-04, 4.240000e-05, 0.000000e+00], // 765
    [8.307527e-05, 3.000000e-05, 0.000000e+00], // 770
    [5.870652e-05, 2.120000e-05, 0.000000e+00], // 775
    [4.150994e-05, 1.499000e-05, 0.000000e+00], // 780
];

// CIE standard illuminant D65 relative spectral power, 360–780 nm in 5 nm steps.
#[rustfmt::skip]
pub(crate) const D65_SPD: [f64; 85] = [
    46.64, 49.36, 52.09, 51.03, 49.98, 52.31, 54.65, 68.7,
    82.75, 87.12, 91.49, 92.46, 93.43, 90.06, 86.68, 95.77,
    104.9, 110.9, 117.0, 117.4, 117.8, 116.3, 114.9, 115.4,
    115.9, 112.4, 108.8, 109.1, 109.4, 108.6, 107.8, 106.3,
    104.8, 106.2, 107.7, 106.0, 104.4, 104.2, 104.0, 102.0,
    100.0, 98.17, 96.33, 96.06, 95.79, 92.24, 88.69, 89.35,
    90.01, 89.8, 89.6, 88.65, 87.7, 85.49, 83.29, 83.49,
    83.7, 81.86, 80.03, 80.12, 80.21, 81.25, 82.28, 80.28,
    78.28, 74.0, 69.72, 70.67, 71.61, 72.98, 74.35, 67.98,
    61.6, 65.74, 69.89, 72.49, 75.09, 69.34, 63.59, 55.01,
    46.42, 56.61, 66.81, 65.09, 63.38,
];

// Average spectral reflectance of the 24 ColorChecker patches, 380–730 nm in 10 nm steps,
// row-major from dark skin to black.
pub(crate) const CHECKER_START_NM: f64 = 380.0;
pub(crate) const CHECKER_STEP_NM: f64 = 10.0;
#[rustfmt::skip]
pub(crate) const CHECKER_REFLECTANCE: [[f64; 36]; 24] = [
    // dark skin
    [0.055, 0.058, 0.061, 0.062, 0.062, 0.062, 0.062, 0.062, 0.062, 0.062, 0.062, 0.063, 0.065, 0.07, 0.076, 0.079, 0.081, 0.084, 0.091, 0.103, 0.119, 0.134, 0.143, 0.147, 0.151, 0.158, 0.168, 0.179, 0.188, 0.19, 0.186, 0.181, 0.182, 0.187, 0.196, 0.209],
    // light skin
    [0.117, 0.143, 0.175, 0.191, 0.196, 0.199, 0.204, 0.213, 0.228, 0.251, 0.28, 0.309, 0.329, 0.333, 0.315, 0.286, 0.273, 0.276, 0.277, 0.289, 0.339, 0.42, 0.488, 0.525, 0.546, 0.562, 0.578, 0.595, 0.612, 0.625, 0.638, 0.656, 0.678, 0.7, 0.717, 0.734],
    // blue sky
    [0.13, 0.177, 0.251, 0.306, 0.324, 0.33, 0.333, 0.331, 0.323, 0.311, 0.298, 0.285, 0.269, 0.25, 0.231, 0.214, 0.199, 0.185, 0.169, 0.157, 0.149, 0.145, 0.142, 0.141, 0.141, 0.141, 0.143, 0.147, 0.152, 0.154, 0.15, 0.144, 0.136, 0.132, 0.135, 0.147],
    // foliage
    [0.051, 0.054, 0.056, 0.057, 0.058, 0.059, 0.06, 0.061, 0.062, 0.063, 0.065, 0.067, 0.075, 0.101, 0.145, 0.178, 0.184, 0.17, 0.149, 0.133, 0.122, 0.115, 0.109, 0.105, 0.104, 0.106, 0.109, 0.112, 0.114, 0.114, 0.112, 0.112, 0.115, 0.12, 0.125, 0.13],
    // blue flower
    [0.144, 0.198, 0.294, 0.375, 0.408, 0.421, 0.426, 0.426, 0.419, 0.403, 0.379, 0.346, 0.311, 0.281, 0.254, 0.229, 0.214, 0.208, 0.202, 0.194, 0.193, 0.2, 0.214, 0.23, 0.241, 0.254, 0.279, 0.313, 0.348, 0.366, 0.366, 0.359, 0.358, 0.365, 0.377, 0.398],
    // bluish green
    [0.136, 0.179, 0.247, 0.297, 0.32, 0.337, 0.355, 0.381, 0.419, 0.466, 0.51, 0.546, 0.567, 0.574, 0.569, 0.551, 0.524, 0.488, 0.445, 0.4, 0.35, 0.299, 0.252, 0.221, 0.204, 0.196, 0.191, 0.188, 0.191, 0.199, 0.212, 0.223, 0.232, 0.233, 0.229, 0.229],
    // orange
    [0.054, 0.054, 0.053, 0.054, 0.054, 0.055, 0.055, 0.055, 0.056, 0.057, 0.058, 0.061, 0.068, 0.089, 0.125, 0.154, 0.174, 0.199, 0.248, 0.335, 0.444, 0.538, 0.587, 0.595, 0.591, 0.587, 0.584, 0.584, 0.59, 0.603, 0.62, 0.639, 0.655, 0.663, 0.663, 0.667],
    // purplish blue
    [0.122, 0.164, 0.229, 0.286, 0.327, 0.361, 0.388, 0.4, 0.392, 0.362, 0.316, 0.26, 0.209, 0.168, 0.138, 0.117, 0.104, 0.096, 0.09, 0.086, 0.084, 0.084, 0.084, 0.084, 0.084, 0.085, 0.09, 0.098, 0.109, 0.123, 0.143, 0.169, 0.205, 0.244, 0.287, 0.332],
    // moderate red
    [0.096, 0.115, 0.131, 0.135, 0.133, 0.132, 0.13, 0.128, 0.125, 0.12, 0.115, 0.11, 0.105, 0.1, 0.095, 0.093, 0.092, 0.093, 0.096, 0.108, 0.156, 0.265, 0.399, 0.5, 0.556, 0.579, 0.588, 0.591, 0.593, 0.594, 0.598, 0.602, 0.607, 0.609, 0.609, 0.61],
    // purple
    [0.092, 0.116, 0.146, 0.169, 0.178, 0.173, 0.158, 0.139, 0.119, 0.101, 0.087, 0.075, 0.066, 0.06, 0.056, 0.053, 0.051, 0.051, 0.052, 0.052, 0.051, 0.052, 0.058, 0.073, 0.096, 0.119, 0.141, 0.166, 0.194, 0.227, 0.265, 0.309, 0.355, 0.396, 0.436, 0.478],
    // yellow green
    [0.061, 0.061, 0.062, 0.063, 0.064, 0.066, 0.069, 0.075, 0.085, 0.105, 0.139, 0.192, 0.271, 0.376, 0.476, 0.531, 0.549, 0.546, 0.528, 0.504, 0.471, 0.428, 0.381, 0.347, 0.327, 0.318, 0.312, 0.31, 0.314, 0.327, 0.345, 0.363, 0.376, 0.381, 0.378, 0.379],
    // orange yellow
    [0.063, 0.063, 0.063, 0.064, 0.064, 0.064, 0.065, 0.066, 0.067, 0.068, 0.071, 0.076, 0.087, 0.125, 0.206, 0.305, 0.383, 0.431, 0.469, 0.518, 0.568, 0.607, 0.628, 0.637, 0.64, 0.642, 0.645, 0.648, 0.651, 0.653, 0.657, 0.664, 0.673, 0.68, 0.684, 0.688],
    // blue
    [0.066, 0.079, 0.102, 0.146, 0.2, 0.244, 0.282, 0.309, 0.308, 0.278, 0.231, 0.178, 0.13, 0.094, 0.07, 0.054, 0.046, 0.042, 0.039, 0.038, 0.038, 0.038, 0.038, 0.039, 0.039, 0.04, 0.041, 0.042, 0.044, 0.045, 0.046, 0.046, 0.048, 0.052, 0.057, 0.065],
    // green
    [0.052, 0.053, 0.054, 0.055, 0.057, 0.059, 0.061, 0.066, 0.075, 0.093, 0.125, 0.178, 0.246, 0.307, 0.337, 0.334, 0.317, 0.293, 0.262, 0.23, 0.198, 0.165, 0.135, 0.115, 0.104, 0.098, 0.094, 0.092, 0.093, 0.097, 0.102, 0.108, 0.113, 0.115, 0.114, 0.114],
    // red
    [0.05, 0.049, 0.048, 0.047, 0.047, 0.047, 0.047, 0.047, 0.046, 0.045, 0.044, 0.044, 0.045, 0.046, 0.047, 0.048, 0.049, 0.05, 0.054, 0.06, 0.072, 0.104, 0.178, 0.312, 0.467, 0.581, 0.644, 0.675, 0.69, 0.698, 0.706, 0.715, 0.724, 0.73, 0.734, 0.738],
    // yellow
    [0.058, 0.054, 0.052, 0.052, 0.053, 0.054, 0.056, 0.059, 0.067, 0.081, 0.107, 0.152, 0.225, 0.336, 0.462, 0.559, 0.616, 0.65, 0.672, 0.694, 0.71, 0.723, 0.731, 0.739, 0.746, 0.752, 0.758, 0.764, 0.769, 0.771, 0.776, 0.782, 0.79, 0.796, 0.799, 0.804],
    // magenta
    [0.145, 0.195, 0.283, 0.346, 0.362, 0.354, 0.334, 0.306, 0.276, 0.248, 0.218, 0.19, 0.168, 0.149, 0.127, 0.107, 0.1, 0.102, 0.104, 0.109, 0.137, 0.2, 0.29, 0.4, 0.516, 0.615, 0.687, 0.732, 0.76, 0.774, 0.783, 0.793, 0.803, 0.812, 0.817, 0.825],
    // cyan
    [0.108, 0.141, 0.192, 0.236, 0.261, 0.286, 0.317, 0.353, 0.39, 0.426, 0.446, 0.444, 0.423, 0.385, 0.337, 0.283, 0.231, 0.185, 0.146, 0.118, 0.101, 0.09, 0.082, 0.076, 0.074, 0.073, 0.073, 0.074, 0.076, 0.077, 0.076, 0.075, 0.073, 0.072, 0.074, 0.079],
    // white 9.5 (.05 D)
    [0.189, 0.255, 0.423, 0.66, 0.811, 0.862, 0.877, 0.884, 0.891, 0.896, 0.899, 0.904, 0.907, 0.909, 0.911, 0.91, 0.911, 0.914, 0.913, 0.916, 0.915, 0.916, 0.914, 0.915, 0.918, 0.919, 0.921, 0.923, 0.924, 0.922, 0.922, 0.925, 0.927, 0.93, 0.93, 0.933],
    // neutral 8 (.23 D)
    [0.171, 0.232, 0.365, 0.507, 0.567, 0.583, 0.588, 0.59, 0.591, 0.59, 0.588, 0.588, 0.589, 0.589, 0.591, 0.59, 0.59, 0.59, 0.589, 0.591, 0.59, 0.59, 0.587, 0.585, 0.583, 0.58, 0.578, 0.576, 0.574, 0.572, 0.571, 0.569, 0.568, 0.568, 0.566, 0.566],
    // neutral 6.5 (.44 D)
    [0.144, 0.192, 0.272, 0.331, 0.35, 0.357, 0.361, 0.363, 0.363, 0.361, 0.359, 0.358, 0.358, 0.359, 0.36, 0.36, 0.361, 0.361, 0.36, 0.362, 0.362, 0.361, 0.359, 0.358, 0.355, 0.352, 0.35, 0.348, 0.345, 0.343, 0.34, 0.338, 0.335, 0.334, 0.332, 0.331],
    // neutral 5 (.70 D)
    [0.105, 0.131, 0.163, 0.18, 0.186, 0.19, 0.193, 0.194, 0.194, 0.192, 0.191, 0.191, 0.191, 0.192, 0.192, 0.192, 0.192, 0.192, 0.192, 0.193, 0.192, 0.192, 0.191, 0.189, 0.188, 0.186, 0.184, 0.182, 0.181, 0.179, 0.178, 0.176, 0.174, 0.173, 0.172, 0.171],
    // neutral 3.5 (1.05 D)
    [0.068, 0.077, 0.084, 0.087, 0.089, 0.09, 0.092, 0.092, 0.091, 0.09, 0.09, 0.09, 0.09, 0.09, 0.09, 0.09, 0.09, 0.09, 0.09, 0.09, 0.09, 0.089, 0.089, 0.088, 0.087, 0.086, 0.086, 0.085, 0.084, 0.084, 0.083, 0.083, 0.082, 0.081, 0.081, 0.081],
    // black 2 (1.5 D)
    [0.031, 0.032, 0.032, 0.033, 0.033, 0.033, 0.033, 0.033, 0.032, 0.032, 0.032, 0.032, 0.032, 0.032, 0.032, 0.032, 0.032, 0.032, 0.032, 0.032, 0.032, 0.032, 0.032, 0.032, 0.032, 0.032, 0.032, 0.032, 0.032, 0.032, 0.032, 0.032, 0.032, 0.032, 0.032, 0.033],
];

pub const CHECKER_NAMES: [&str; 24] = [
    "dark skin",
    "light skin",
    "blue sky",
    "foliage",
    "blue flower",
    "bluish green",
    "orange",
    "purplish blue",
    "moderate red",
    "purple",
    "yellow green",
    "orange yellow",
    "blue",
    "green",
    "red",
    "yellow",
    "magenta",
    "cyan",
    "white 9.5 (.05 D)",
    "neutral 8 (.23 D)",
    "neutral 6.5 (.44 D)",
    "neutral 5 (.70 D)",
    "neutral 3.5 (1.05 D)",
    "black 2 (1.5 D)",
];
