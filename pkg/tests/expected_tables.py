"""Analytical values of the standard D=14 tables, as previously tabulated.

Keys are ``(row, col)``; rows are goal levels (or goal peaks), columns goal
probabilities (or spreads).
"""

SGL_BFS = {
    (5, 0.01): 46.640, (5, 0.1): 39.860,
    (8, 0.001): 378.040, (8, 0.01): 333.850, (8, 0.1): 265.000,
    (11, 0.001): 2744.060, (11, 0.01): 2147.000, (11, 0.1): 2057.000,
    (14, 0.001): 17383.000, (14, 0.01): 16483.000, (14, 0.1): 16393.000,
}

SGL_DFS = {
    (5, 0.01): 14998.160, (5, 0.1): 8052.840,
    (8, 0.001): 15623.370, (8, 0.01): 9966.700, (8, 0.1): 1154.000,
    (11, 0.001): 11138.900, (11, 0.01): 1586.000, (11, 0.1): 146.000,
    (14, 0.001): 2000.000, (14, 0.01): 200.000, (14, 0.1): 20.000,
}

MGL_BFS = {
    (5, 0.1): 37.04, (5, 1): 41.55, (5, 10): 83.72, (5, 100): 210.78,
    (8, 0.1): 261.26, (8, 1): 173.42, (8, 10): 119.79, (8, 100): 210.98,
    (11, 0.1): 2049.53, (11, 1): 952.97, (11, 10): 304.96, (11, 100): 247.51,
    (14, 0.1): 16152.78, (14, 1): 5136.32, (14, 10): 960.61, (14, 100): 329.73,
}

MGL_DFS = {
    (5, 0.1): 5949.04, (5, 1): 10073.73, (5, 10): 3476.9, (5, 100): 379.13,
    (8, 0.1): 743.63, (8, 1): 1259.22, (8, 10): 473.6, (8, 100): 259.96,
    (11, 0.1): 92.95, (11, 1): 157.4, (11, 10): 106.74, (11, 100): 211.69,
    (14, 0.1): 11.62, (14, 1): 32.89, (14, 10): 74.46, (14, 100): 205.02,
}

BG_BFS = SGL_BFS

BG_DFS_MEAN = {
    (5, 0.01): 31365.160, (5, 0.1): 30186.420,
    (8, 0.001): 27406.500, (8, 0.01): 24420.620, (8, 0.1): 15203.750,
    (11, 0.001): 16787.500, (11, 0.01): 5805.720, (11, 0.1): 1787.770,
    (14, 0.001): 1522.440, (14, 0.01): 164.600, (14, 0.1): 20.060,
}

BG_DFS_LOWER = {
    (5, 0.01): 30711.110, (5, 0.1): 29079.660,
    (8, 0.001): 25737.500, (8, 0.01): 22151.330, (8, 0.1): 12072.300,
    (11, 0.001): 14163.510, (11, 0.01): 3821.900, (11, 0.1): 918.600,
    (14, 0.001): 808.840, (14, 0.01): 54.120, (14, 0.1): 3.990,
}

BG_DFS_UPPER = {
    (5, 0.01): 32019.210, (5, 0.1): 31293.180,
    (8, 0.001): 29075.500, (8, 0.01): 26689.920, (8, 0.1): 18335.200,
    (11, 0.001): 19411.490, (11, 0.01): 7789.540, (11, 0.1): 2656.940,
    (14, 0.001): 2236.050, (14, 0.01): 275.080, (14, 0.1): 36.120,
}
