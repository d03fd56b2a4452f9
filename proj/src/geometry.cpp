#include "holecalib/geometry.hpp"

namespace holecalib {

template class RigidTransform<double>;
template class RigidTransform<float>;

}  // namespace holecalib
