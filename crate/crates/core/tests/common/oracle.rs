// Generated by tests/oracle/reference.py (mpmath, 50 digits). Do not edit.
#![allow(dead_code)]

/// (ω/ω₀, d_dip_pmfl, d_pfl_mfl, d_Efl_Hfl) in N·s for R = 50 μm,
/// Ω/2π = 10 kHz, T₀ = T₁ = 300 K, Mie response, base material.
pub const INTEGRANDS_300K: [(f64, f64, f64, f64); 12] = [
    (0.3, 8.1704949344379786e-43, -4.5759158326957283e-49, 1.9832869266366474e-45),
    (0.5, 1.2642167771540238e-41, -7.2865895698814591e-47, 7.5012544958614872e-44),
    (0.7, 1.7509167538083116e-40, -6.3824120943604434e-45, 1.5358198033141693e-42),
    (0.85, 2.2010480756245032e-39, -4.1872733177103273e-43, 1.9797148758307855e-41),
    (0.95, 3.8656094924375203e-38, -4.82571848561047e-41, 2.5891417087608163e-40),
    (0.99, 1.7756886745135078e-37, -7.7743499227629105e-40, 6.98947813101702e-40),
    (1.0, 2.1786366500637253e-37, -1.3020729360520881e-39, 7.454547177655637e-40),
    (1.02, 1.0151519117999853e-37, -1.0204596705941893e-39, -5.1912343850262494e-40),
    (1.1, -4.6229007625416616e-38, 6.5186693363257049e-41, -8.860003601821268e-41),
    (1.3, -2.0878229487522891e-39, 4.9008826060731698e-43, 4.0952806617554026e-41),
    (2.0, -4.2290472305331572e-40, 1.2444870831004799e-42, 5.5227052526828947e-41),
    (3.0, -2.3218705586509411e-39, 8.7982450603925483e-41, 5.2180709038719527e-41),
];

/// Same at T₀ = T₁ = 0.
pub const INTEGRANDS_0K: [(f64, f64, f64, f64); 4] = [
    (0.5, 2.1101223245202736e-43, -1.1740128235813983e-48, 8.9344621167978941e-46),
    (1.0, 5.3179657769751849e-39, -3.1604162018340952e-41, 1.7755142776234253e-41),
    (1.1, -1.1808918042031698e-39, 1.6750206448680227e-42, -2.3211982662245679e-42),
    (2.0, -2.4085552847888596e-41, 6.8884331232580437e-44, 2.6292898270638714e-42),
];

/// (ω/ω₀, R, α_e/ε₀ re, im, α_m/μ₀ re, im, χ re, im) for the Mie response.
pub const MIE_RESPONSE: [(f64, f64, f64, f64, f64, f64, f64, f64); 4] = [
    (0.5, 50e-6, 6.9761976772934958e-13, 3.2675207246740017e-15, 3.4919467891544245e-14, 3.0140561125577012e-15, 6.3930202154183038e-23, 4.4421632806195251e-24),
    (1.0, 50e-6, 8.8071159242382803e-13, 3.4011484396168943e-13, 2.6351121133074222e-13, 3.7117944482608321e-13, 7.899772982272973e-22, 1.1847949327473753e-21),
    (1.0, 10e-6, 7.2861121144502294e-15, 2.1572937294791987e-15, 2.3419583463954451e-15, 2.5913058169695178e-15, 7.3508284722889549e-24, 7.9689082348492905e-24),
    (2.5, 50e-6, 6.7237494816174156e-13, 9.3053214609926406e-14, 5.4208179477578779e-14, 7.6515097533686732e-16, -6.8027260124367034e-23, -9.4353304920767678e-24),
];

/// Photon number at ω₀ and 300 K.
pub const PHOTON_NUMBER_W0_300K: f64 = 2.0992642164595132e+1;
