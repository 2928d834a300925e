// implementation pending
namespace tilesmith {}
