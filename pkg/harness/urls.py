from django.urls import path, include
from rest_framework import routers

from .views import EvolveView, ResolveView, SuiteRunViewSet

app_name = "harness"

router = routers.DefaultRouter(trailing_slash=False)
router.register(r'runs', SuiteRunViewSet, basename='runs')

urlpatterns = [
    path('', include(router.urls)),
    path('resolve', ResolveView.as_view(), name='resolve'),
    path('evolve', EvolveView.as_view(), name='evolve'),
]
