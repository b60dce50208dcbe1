//! Frozen random samples used by the normality-test oracles.

pub const NORM100: [f64; 100] = [
    1.749455, -0.286073, -0.484565, -2.653319, -0.008285, -0.319631, -0.536629, 0.315403, 
    0.421051, -1.065603, -0.88624, -0.475733, 0.689682, 0.561192, -1.305549, -1.119475, 
    0.736837, 1.574634, -0.031075, -0.683447, 1.09563, -0.309577, 0.725752, 1.549072, 0.63008, 
    0.073493, 0.732271, -0.642575, -0.178093, -0.573955, -0.204375, -0.486495, -0.185775, 
    -0.380536, 0.088978, 0.063672, 0.296347, 1.402771, -1.546863, 1.295619, -0.23725, 
    -1.232346, -0.17242, 0.091838, 1.067558, -1.061634, 0.217348, 0.11782, -1.684111, 
    -1.185755, 0.600102, 0.695567, 1.087711, 0.533822, 0.395212, 0.122868, 1.209102, -0.843066, 
    -0.141894, 0.385354, -1.577494, 1.310944, -0.792865, -0.071749, 2.156674, -0.829437, 
    -0.529372, 1.561704, -1.080194, -0.432058, 0.516084, 0.455393, 0.593686, 0.370506, 
    1.345378, 1.015942, 0.595278, -0.682802, -0.71356, -1.90829, 0.687312, -1.82301, 0.879114, 
    1.846365, -1.061654, -0.684485, -0.476214, 0.83031, -0.863353, -0.130541, -0.523088, 
    -0.251277, 1.291275, -0.964205, 0.07176, 0.271606, 0.858667, -1.264074, 1.11487, 0.434777, 
];

pub const UNIF100: [f64; 100] = [
    0.777702, 0.237541, 0.824279, 0.965749, 0.972601, 0.453449, 0.609042, 0.775527, 0.641613, 
    0.722018, 0.035037, 0.298449, 0.058512, 0.857061, 0.372854, 0.679848, 0.25628, 0.347581, 
    0.009413, 0.358334, 0.949094, 0.217899, 0.319391, 0.917772, 0.031904, 0.065085, 0.629829, 
    0.873813, 0.008716, 0.746577, 0.812841, 0.075717, 0.656455, 0.509262, 0.479883, 0.955574, 
    1.2e-05, 0.246979, 0.712233, 0.324582, 0.276996, 0.695445, 0.918552, 0.244476, 0.458086, 
    0.252993, 0.379333, 0.604539, 0.772379, 0.067917, 0.686085, 0.54826, 0.137986, 0.098753, 
    0.245559, 0.151787, 0.925994, 0.680105, 0.237659, 0.568885, 0.556632, 0.072737, 0.839709, 
    0.405319, 0.144871, 0.19092, 0.49064, 0.712024, 0.984938, 0.874787, 0.499042, 0.10678, 
    0.913213, 0.364916, 0.226588, 0.872432, 0.136358, 0.23638, 0.595399, 0.563923, 0.958935, 
    0.453239, 0.128958, 0.760568, 0.201634, 0.17573, 0.437118, 0.340261, 0.967253, 0.143026, 
    0.844559, 0.669406, 0.109305, 0.088254, 0.966462, 0.194297, 0.0819, 0.269385, 0.650131, 
    0.546777, 
];
