"""
URL configuration for DirichletLab project.

The `urlpatterns` list routes URLs to views. For more information please see:
    https://docs.djangoproject.com/en/4.2/topics/http/urls/

The lab itself is driven by management commands; the `lab/` API exposes the
resolvent solvers and the saved suite runs.
"""
from django.contrib import admin
from django.urls import path, include

urlpatterns = [
    path('admin/', admin.site.urls),
    path('lab/', include('harness.urls', namespace='harness')),
]
