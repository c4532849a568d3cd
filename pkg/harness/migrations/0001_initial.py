# Generated by Django 4.2.1 on 2026-10-18 10:12

from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='SuiteRun',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('command', models.CharField(max_length=32)),
                ('seed', models.BigIntegerField(blank=True, null=True)),
                ('n_samples', models.PositiveIntegerField(default=0)),
                ('config', models.JSONField(default=dict)),
                ('report', models.JSONField(default=dict)),
                ('violations', models.PositiveIntegerField(default=0)),
                ('exit_code', models.PositiveSmallIntegerField(default=0)),
                ('created', models.DateTimeField(auto_now_add=True)),
            ],
            options={
                'ordering': ['-created'],
            },
        ),
    ]
