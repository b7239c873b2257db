#ifndef OPALG_OPALG_HPP
#define OPALG_OPALG_HPP

#include "opalg/errors.hpp"
#include "opalg/random.hpp"
#include "opalg/matcore.hpp"
#include "opalg/linmap.hpp"
#include "opalg/opspace.hpp"
#include "opalg/defect.hpp"
#include "opalg/perturb.hpp"
#include "opalg/interval.hpp"
#include "opalg/certify.hpp"

#endif  // OPALG_OPALG_HPP
