#pragma once

#include "umpclear/model/case.hpp"
#include "umpclear/scuc/master.hpp"
#include "umpclear/scuc/schedule.hpp"

namespace umpclear {

// Adds device `index` of the case to a built master: base schedule with
// charge/discharge indicators plus a recourse copy in every scenario block.
// Net bus injection of the device is -(P^D + P^C).
void attach_storage(MasterModel& m, const SystemCase& c, int index);

StorageSchedule extract_storage(const MasterModel& m, const StorageLayout& layout, const Eigen::VectorXd& x,
                                int horizon);

// One-hour deliverable reserve of a device around its scheduled net injection.
Reserve storage_reserve(const StorageDevice& d, const StorageSchedule& s, int t, double dt = 1.0);

}  // namespace umpclear
