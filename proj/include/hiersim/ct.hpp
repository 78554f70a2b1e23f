#pragma once

namespace hiersim::ct {

// Discrete PI controller with back-calculation anti-windup. One instance per
// tier; drives the response time toward its set point by allotting CUs. The
// pre-saturation output is the tier's unsaturated CU demand and feeds the
// supervisory need index.

struct PIController {
    double kp = 2.0;            // CU per second of error
    double ki = 0.5;            // CU per second of error per second
    double tracking_gain = 0.2; // k_t, 1/second; unwinds the integral under saturation
    double period = 0.5;        // sample period T_ct, seconds
    double setpoint = 0.3;      // target response time, seconds
    double integral = 0.0;      // CU
    double last_cu_desired = 0.0;
    double last_cu_allocated = 0.0;
};

struct PIUpdate {
    PIController ctrl;
    double cu_allocated = 0.0; // clamped to [0, cu_maxavail]
    double cu_desired = 0.0;   // pre-saturation output
};

/// One controller step. cu_desired = kp*e + integral with e = measured -
/// setpoint; cu_allocated clamps that to [0, cu_maxavail]; the integral
/// update adds ki*T*e plus the back-calculation term k_t*T*(allocated -
/// desired).
PIUpdate pi_update(const PIController& ctrl, double measured_response,
                   double cu_maxavail);

/// Resource-insufficiency signal fed upward: (desired - maxavail)/maxavail.
/// Zero when the allotment exactly suffices, positive when starved.
double need_index(double cu_desired, double cu_maxavail);

/// Replace the set point, keeping the integral (bumpless transfer).
PIController update_setpoint(const PIController& ctrl, double new_setpoint);

} // namespace hiersim::ct
