#include "hiersim/ct.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hiersim/errors.hpp"

namespace hiersim::ct {

namespace {

void require_finite(double v, const char* field) {
    if (!std::isfinite(v)) {
        throw SimError(std::string("non-finite ") + field);
    }
}

} // namespace

PIUpdate pi_update(const PIController& ctrl, double measured_response,
                   double cu_maxavail) {
    require_finite(measured_response, "measured_response");
    require_finite(cu_maxavail, "cu_maxavail");
    require_finite(ctrl.integral, "controller integral");
    if (cu_maxavail < 1.0) {
        throw SimError("cu_maxavail below 1");
    }
    if (ctrl.period <= 0.0) {
        throw SimError("non-positive controller period");
    }

    const double e = measured_response - ctrl.setpoint;
    const double u_raw = ctrl.kp * e + ctrl.integral;
    const double u_sat = std::clamp(u_raw, 0.0, cu_maxavail);

    PIUpdate out;
    out.ctrl = ctrl;
    out.ctrl.integral = ctrl.integral + ctrl.ki * ctrl.period * e +
                        ctrl.tracking_gain * ctrl.period * (u_sat - u_raw);
    out.ctrl.last_cu_desired = u_raw;
    out.ctrl.last_cu_allocated = u_sat;
    out.cu_desired = u_raw;
    out.cu_allocated = u_sat;
    return out;
}

double need_index(double cu_desired, double cu_maxavail) {
    require_finite(cu_desired, "cu_desired");
    require_finite(cu_maxavail, "cu_maxavail");
    if (cu_maxavail < 1.0) {
        throw SimError("cu_maxavail below 1");
    }
    return (cu_desired - cu_maxavail) / cu_maxavail;
}

PIController update_setpoint(const PIController& ctrl, double new_setpoint) {
    require_finite(new_setpoint, "setpoint");
    if (new_setpoint <= 0.0) {
        throw SimError("non-positive setpoint");
    }
    PIController out = ctrl;
    out.setpoint = new_setpoint;
    return out;
}

} // namespace hiersim::ct
