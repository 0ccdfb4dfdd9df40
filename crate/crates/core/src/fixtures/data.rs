// Printed set and target coefficients for the four worked examples.

pub(super) const EX1_SET_TAIL: [[f64; 3]; 3] = [
    [-0.0453, -0.0429, -0.0774],
    [-0.3348, -0.2708, -0.2571],
    [0.0287, 0.2456, -0.0534],
];

pub(super) const EX1_TARGET_TAILS: [[f64; 3]; 3] = [
    [-0.0989, 0.1337, -0.1564],
    [-0.1810, 0.0522, 0.2173],
    [0.2285, -0.0403, 0.2218],
];

pub(super) const EX2_TARGET_TAIL: [f64; 3] = [0.4533, 0.1255, 0.5061];

pub(super) const EX3_SET: [[f64; 9]; 15] = [
    [
        0.5774, -0.0089, 0.0192, 0.0446, -0.0585, -0.0403, -0.0061, 0.0094, 0.0210,
    ],
    [
        0.5774, -0.0679, -0.0568, 0.0278, -0.0335, 0.0708, -0.1094, 0.1036, -0.1595,
    ],
    [
        0.5774, 0.3314, -0.2469, -0.0453, -0.0119, -0.2463, 0.1383, 0.0430, -0.1808,
    ],
    [
        0.5774, 0.0138, 0.2443, -0.2903, 0.2369, -0.1108, -0.0694, 0.2347, -0.1709,
    ],
    [
        0.5774, -0.1427, -0.0667, -0.4253, -0.3187, -0.1495, -0.3435, 0.3087, 0.2761,
    ],
    [
        0.5774, -0.1204, -0.1235, 0.0178, -0.1018, -0.0949, 0.1963, -0.0295, -0.0742,
    ],
    [
        0.5774, -0.2536, 0.1011, -0.0765, 0.2108, 0.2307, 0.3318, -0.1931, 0.2599,
    ],
    [
        0.5774, -0.1104, 0.1763, -0.0249, 0.2200, 0.3024, -0.0175, 0.1947, 0.2628,
    ],
    [
        0.5774, -0.0702, 0.1844, -0.1471, -0.3248, 0.2558, -0.0720, -0.3141, -0.1375,
    ],
    [
        0.5774, 0.0639, 0.0988, 0.1477, -0.1330, -0.1263, 0.1457, 0.0014, 0.1164,
    ],
    [
        0.5774, 0.0480, -0.0487, -0.0103, 0.0349, 0.0063, -0.0174, -0.0342, 0.0324,
    ],
    [
        0.5774, 0.0888, -0.0107, 0.0179, -0.0196, -0.0241, 0.0779, 0.0117, 0.1170,
    ],
    [
        0.5774, -0.0442, -0.0588, -0.0470, -0.0180, -0.0025, -0.0006, -0.0301, -0.0546,
    ],
    [
        0.5774, 0.0104, -0.0121, -0.0060, -0.0082, -0.0087, 0.0133, 0.0029, -0.0065,
    ],
    [
        0.5774, 0.2361, -0.2266, 0.2744, 0.1280, -0.2198, 0.2896, -0.1512, 0.1012,
    ],
];

pub(super) const EX3_TARGET_TAIL: [f64; 8] = [
    0.0568, 0.1463, 0.1405, -0.0456, -0.0531, -0.1342, 0.1669, -0.0918,
];

pub(super) const EX4_TARGET: [f64; 16] = [
    0.5000, 0.3480, -0.0903, -0.2264, -0.0123, -0.3373, -0.1569, 0.2523, 0.0478, 0.3409, -0.1137,
    -0.0728, 0.0766, -0.3191, 0.0155, -0.2063,
];

pub(super) const EX4_SET: [[f64; 16]; 20] = [
    [
        0.5000, 0.3401, 0.2281, 0.1506, -0.1592, 0.0518, 0.1435, -0.0227, 0.0123, -0.0654, -0.1799,
        -0.2337, -0.3263, -0.3152, -0.3466, -0.3052,
    ],
    [
        0.5000, 0.2630, 0.2397, -0.0116, 0.3371, -0.0435, -0.2855, 0.2873, 0.3155, 0.0002, -0.0044,
        0.1938, -0.3148, 0.2518, -0.0674, -0.1989,
    ],
    [
        0.5000, -0.2184, -0.0078, 0.1946, 0.1876, 0.3716, 0.2003, -0.1040, -0.1933, -0.0483,
        0.0962, 0.2114, -0.2066, 0.4027, -0.3182, -0.2010,
    ],
    [
        0.5000, -0.3085, 0.1438, -0.3556, -0.0276, -0.3483, -0.3359, 0.1912, 0.0149, -0.0655,
        0.1375, 0.2116, 0.0990, -0.3137, -0.0414, 0.2411,
    ],
    [
        0.5000, -0.2741, -0.1356, 0.0618, 0.2636, -0.1240, -0.2177, 0.1307, 0.0534, 0.3311, 0.3185,
        0.3498, 0.3522, 0.1482, -0.0426, -0.1383,
    ],
    [
        0.5000, 0.1112, 0.3263, 0.3190, -0.1469, -0.3317, 0.2964, -0.2435, -0.0953, -0.0306,
        0.1241, 0.3175, -0.2460, 0.1503, 0.1725, 0.1075,
    ],
    [
        0.5000, -0.3397, 0.1331, -0.3639, -0.0465, -0.3013, -0.0081, -0.1089, 0.0448, 0.2988,
        0.2088, 0.1497, 0.3078, 0.3506, 0.0583, 0.0359,
    ],
    [
        0.5000, -0.0234, -0.1351, -0.0322, 0.2409, -0.3197, -0.1314, -0.2997, -0.3042, -0.3151,
        -0.2814, -0.0517, -0.0072, 0.2808, -0.0275, 0.3309,
    ],
    [
        0.5000, 0.0011, 0.0720, 0.0828, 0.3043, 0.3365, -0.2482, -0.2899, -0.1409, 0.1969, 0.2455,
        -0.1839, 0.2696, -0.2972, -0.2457, 0.1112,
    ],
    [
        0.5000, -0.0969, -0.2549, -0.1631, 0.3248, -0.1620, -0.2249, 0.0524, -0.3021, -0.2719,
        0.2176, -0.3062, -0.1522, -0.0556, -0.1959, -0.3050,
    ],
    [
        0.5000, -0.1085, -0.1859, -0.2159, -0.3368, -0.1676, -0.2280, 0.2087, -0.0767, 0.2550,
        -0.2157, -0.2451, -0.0837, -0.3492, -0.0487, -0.3334,
    ],
    [
        0.5000, -0.1116, 0.1404, -0.3683, -0.2396, 0.2121, 0.0992, -0.3009, 0.0709, -0.3062,
        -0.2525, 0.2682, 0.0603, -0.3460, -0.0274, -0.1445,
    ],
    [
        0.5000, 0.2993, -0.2373, -0.1311, -0.0875, -0.1534, 0.1559, 0.1657, -0.2268, 0.3667,
        -0.1520, 0.0617, -0.1243, 0.3017, -0.2709, -0.3336,
    ],
    [
        0.5000, 0.3539, 0.0031, -0.3141, -0.1757, -0.3098, 0.3047, -0.0659, 0.1496, -0.0462,
        -0.0051, -0.2103, 0.2230, -0.1621, 0.3111, 0.2460,
    ],
    [
        0.5000, 0.1284, 0.3134, 0.2846, 0.1660, -0.0162, -0.0902, 0.2459, -0.3016, 0.0968, -0.2279,
        0.2806, -0.1189, 0.2264, -0.3173, -0.2467,
    ],
    [
        0.5000, -0.0621, 0.1726, -0.0117, 0.1752, 0.4750, 0.1905, 0.3538, -0.0945, 0.0778, -0.0987,
        -0.3450, -0.0469, -0.0181, 0.2563, 0.2941,
    ],
    [
        0.5000, -0.3708, -0.1331, -0.2681, 0.2228, -0.0237, 0.0812, -0.3113, -0.2672, -0.2705,
        0.1829, 0.0050, -0.1646, -0.1872, 0.3579, 0.0310,
    ],
    [
        0.5000, 0.1800, 0.1847, -0.2499, -0.1384, 0.3771, 0.3414, -0.0918, -0.2475, 0.0291,
        -0.2798, -0.1287, -0.2310, -0.1423, -0.2583, -0.1931,
    ],
    [
        0.5000, -0.2897, 0.0626, -0.2482, 0.0671, 0.2700, 0.2767, -0.0325, 0.2770, -0.2419, 0.0868,
        -0.2809, 0.1914, 0.2186, -0.2852, -0.2412,
    ],
    [
        0.5000, 0.2981, -0.3500, 0.0817, -0.1222, -0.4227, -0.1678, 0.1315, 0.3039, 0.0275, 0.2742,
        -0.0520, 0.1699, 0.2849, 0.0298, 0.1050,
    ],
];
