"""kloc: splitting of the localization sequence for K_{2i}(F)_p."""
