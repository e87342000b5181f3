from .rmst import RMSTResult, rmst_difference_test, rmst_estimate, select_t_star

__all__ = ['RMSTResult', 'rmst_estimate', 'select_t_star', 'rmst_difference_test']
