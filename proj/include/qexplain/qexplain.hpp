#ifndef QEXPLAIN_QEXPLAIN_HPP
#define QEXPLAIN_QEXPLAIN_HPP

#include "qexplain/error.hpp"
#include "qexplain/instance.hpp"
#include "qexplain/instance_io.hpp"
#include "qexplain/query.hpp"
#include "qexplain/set_family.hpp"
#include "qexplain/evaluate.hpp"
#include "qexplain/degree.hpp"
#include "qexplain/hitting_set.hpp"
#include "qexplain/parallel.hpp"
#include "qexplain/repair.hpp"
#include "qexplain/oracle.hpp"
#include "qexplain/core.hpp"
#include "qexplain/lineage.hpp"

#endif // QEXPLAIN_QEXPLAIN_HPP
